#pragma once

#include <map>
#include <string>
#include <vector>

#include "hisd/core.hpp"

namespace hisd {

// ─── Symbols, corpora, grammars ──────────────────────────────────────────────

/// One grammar symbol: a terminal skill id, a reference to a production rule,
/// or the episode-boundary marker.
struct Symbol {
    enum class Kind : unsigned char { Terminal, Rule, Boundary };

    Kind kind = Kind::Terminal;
    int id = 0;     // skill id for terminals, rule id for rule references

    static Symbol terminal(int skill_id) { return {Kind::Terminal, skill_id}; }
    static Symbol rule(int rule_id) { return {Kind::Rule, rule_id}; }
    static Symbol boundary() { return {Kind::Boundary, -1}; }

    bool is_terminal() const { return kind == Kind::Terminal; }
    bool is_rule() const { return kind == Kind::Rule; }
    bool is_boundary() const { return kind == Kind::Boundary; }

    bool operator==(const Symbol&) const = default;
    bool operator<(const Symbol& o) const {
        if (kind != o.kind) return kind < o.kind;
        return id < o.id;
    }
};

/// A flat training corpus: collapsed episode skill sequences joined by single
/// boundary markers.  For E episodes the corpus holds exactly E−1 boundaries,
/// never leading, trailing, or adjacent.
struct Corpus {
    std::vector<Symbol> symbols;
    int episode_count = 0;
};

/// Join collapsed episode sequences into one corpus.  Throws InputError when
/// sequences is empty or any sequence is empty.
Corpus build_corpus(const std::vector<SkillSequence>& sequences);

void validate_corpus(const Corpus& corpus);

/// A context-free grammar over skill symbols.  `start` is the top-level
/// sequence (the only place boundary symbols may appear); `rules` maps dense
/// 1-based rule ids to their bodies (length ≥ 2, boundary-free).
struct Grammar {
    std::vector<Symbol> start;
    std::map<int, std::vector<Symbol>> rules;
};

// ─── Induction and expansion ─────────────────────────────────────────────────

/// Induce a grammar from a corpus by online digram substitution: every
/// repeated non-overlapping digram of non-boundary symbols is replaced by a
/// rule reference, and every rule is referenced at least twice (rules that
/// fall to a single use are inlined).  Digrams containing the boundary marker
/// are never replaced, so boundaries only ever appear in `start`.
/// Rule ids are renumbered densely (in creation order) before returning.
Grammar induce(const Corpus& corpus);

/// Expand a grammar back to the corpus it derives.  Throws InputError with
/// message "cyclic grammar" when rule references form a cycle, or a
/// description of any undefined rule reference.
Corpus expand(const Grammar& grammar);

/// Check structural invariants (boundary placement, body lengths, rule usage
/// counts, digram uniqueness up to self-overlap).  Throws InputError with a
/// description of the first violation.  Intended for tests and debugging.
void validate_grammar(const Grammar& grammar);

// ─── Per-episode parse trees ─────────────────────────────────────────────────

/// Node of a parse tree: a leaf (terminal skill) or an internal node (rule
/// reference, ordered children).  The episode root is a synthetic internal
/// node with id −1.
struct TreeNode {
    bool leaf = false;
    int id = -1;                // skill id for leaves, rule id for internals
    std::vector<TreeNode> children;
};

struct EpisodeTree {
    TreeNode root;
    int episode_index = 0;
};

/// Split the grammar's start sequence at boundaries and build one parse tree
/// per episode (roots are synthetic; children follow rule bodies).
std::vector<EpisodeTree> parse_trees(const Grammar& grammar);

/// Left-to-right leaf frontier of a tree (the episode's skill sequence).
std::vector<int> leaf_frontier(const EpisodeTree& tree);

// ─── Serialization ───────────────────────────────────────────────────────────

/// Text form, one production per line:
///   S0 -> t0 R1 | R1
///   R1 -> t0 t1
/// Terminals print as t<id>, rule references as R<id>, boundaries as '|'.
std::string grammar_to_text(const Grammar& grammar);

/// Structured export (rules map + start list) as a JSON document.
std::string grammar_to_json(const Grammar& grammar);

/// Graphviz DOT rendering of one episode tree.  Leaves are labelled with
/// skill names when provided (fallback "skill_<id>"), internals with R<id>,
/// and the root with "episode".
std::string tree_to_dot(const EpisodeTree& tree,
                        const std::vector<std::string>& skill_names = {});

} // namespace hisd
