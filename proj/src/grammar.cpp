#include "hisd/grammar.hpp"

#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "hisd/errors.hpp"

namespace hisd {

// ─── Corpus construction ─────────────────────────────────────────────────────

Corpus build_corpus(const std::vector<SkillSequence>& sequences) {
    if (sequences.empty()) throw InputError("corpus needs at least one episode");
    Corpus c;
    c.episode_count = static_cast<int>(sequences.size());
    for (size_t i = 0; i < sequences.size(); ++i) {
        if (sequences[i].symbols.empty())
            throw InputError("episode skill sequence is empty");
        if (i > 0) c.symbols.push_back(Symbol::boundary());
        for (int s : sequences[i].symbols) {
            if (s < 0) throw InputError("negative skill id in sequence");
            c.symbols.push_back(Symbol::terminal(s));
        }
    }
    return c;
}

void validate_corpus(const Corpus& corpus) {
    if (corpus.symbols.empty()) throw InputError("corpus is empty");
    if (corpus.episode_count < 1) throw InputError("corpus episode count must be >= 1");
    int boundaries = 0;
    for (size_t i = 0; i < corpus.symbols.size(); ++i) {
        const Symbol& s = corpus.symbols[i];
        if (s.is_rule()) throw InputError("corpus may not contain rule references");
        if (s.is_boundary()) {
            ++boundaries;
            if (i == 0 || i + 1 == corpus.symbols.size())
                throw InputError("corpus boundary may not lead or trail");
            if (corpus.symbols[i - 1].is_boundary())
                throw InputError("corpus boundaries may not be adjacent");
        }
    }
    if (boundaries != corpus.episode_count - 1)
        throw InputError("corpus boundary count must equal episode_count - 1");
}

// ─── Induction engine ────────────────────────────────────────────────────────
//
// Online digram substitution over a doubly-linked symbol arena.  Rule bodies
// are circular lists closed by one guard node per rule; a hash index maps
// each digram to its canonical occurrence.  Two structural properties are
// maintained after every appended symbol:
//   * no digram of non-boundary symbols occurs twice without overlapping;
//   * every rule is referenced at least twice (single-use rules are inlined).
// Digrams containing the boundary marker are never indexed, which confines
// boundaries to the start sequence.

namespace {

using Code = std::int64_t;

constexpr Code kBoundaryCode = -1;

inline bool is_rule_code(Code c) { return c <= -2; }
inline int rule_of(Code c) { return static_cast<int>(-c - 2); }
inline Code code_of_rule(int rule_id) { return -static_cast<Code>(rule_id) - 2; }

inline std::uint64_t digram_key(Code a, Code b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint64_t>(static_cast<std::uint32_t>(b));
}

class Builder {
public:
    Builder() {
        rules_.push_back(RuleRec{});   // rule 0 = start sequence
        rules_[0].guard = new_guard(0);
        rules_[0].alive = true;
        rules_[0].refs = 2;            // never considered for inlining
    }

    void append(Code c) {
        const int g = rules_[0].guard;
        const int last = nodes_[g].prev;
        const int n = new_node(c);
        join(last, n);
        join(n, g);
        push_dirty(last);
        drain();
    }

    Grammar export_grammar() const {
        Grammar out;
        // dense ids in creation order, 1-based, live rules only
        std::map<int, int> dense;
        for (size_t r = 1; r < rules_.size(); ++r)
            if (rules_[r].alive) {
                int id = static_cast<int>(dense.size()) + 1;
                dense[static_cast<int>(r)] = id;
            }
        auto to_symbol = [&](Code c) {
            if (c == kBoundaryCode) return Symbol::boundary();
            if (is_rule_code(c)) return Symbol::rule(dense.at(rule_of(c)));
            return Symbol::terminal(static_cast<int>(c));
        };
        out.start = body_of(0, to_symbol);
        for (const auto& [creation_id, id] : dense)
            out.rules[id] = body_of(creation_id, to_symbol);
        return out;
    }

private:
    struct Node {
        Code sym = 0;
        int prev = -1, next = -1;
        int guard_of = -1;              // rule id when this node is a guard
        std::uint32_t gen = 0;
    };
    struct RuleRec {
        int guard = -1;
        int refs = 0;
        bool alive = false;
    };

    std::vector<Node> nodes_;
    std::vector<int> free_;
    std::vector<RuleRec> rules_;
    std::unordered_map<std::uint64_t, int> digrams_;
    std::deque<std::pair<int, std::uint32_t>> work_;

    // ── arena ──
    int alloc() {
        if (!free_.empty()) {
            int i = free_.back();
            free_.pop_back();
            return i;
        }
        nodes_.push_back(Node{});
        return static_cast<int>(nodes_.size()) - 1;
    }
    int new_node(Code c) {
        int i = alloc();
        nodes_[i].sym = c;
        nodes_[i].prev = nodes_[i].next = -1;
        nodes_[i].guard_of = -1;
        return i;
    }
    int new_guard(int rule_id) {
        int i = new_node(0);
        nodes_[i].guard_of = rule_id;
        nodes_[i].prev = nodes_[i].next = i;   // empty circular body
        return i;
    }
    void free_node(int i) {
        nodes_[i].gen++;
        nodes_[i].prev = nodes_[i].next = -1;
        nodes_[i].guard_of = -1;
        free_.push_back(i);
    }
    bool is_guard(int i) const { return nodes_[i].guard_of >= 0; }

    // ── digram index ──
    bool indexable(int i) const {
        int j = nodes_[i].next;
        if (j < 0 || is_guard(i) || is_guard(j)) return false;
        return nodes_[i].sym != kBoundaryCode && nodes_[j].sym != kBoundaryCode;
    }
    void unindex_at(int i) {
        if (!indexable(i)) return;
        auto it = digrams_.find(digram_key(nodes_[i].sym, nodes_[nodes_[i].next].sym));
        if (it != digrams_.end() && it->second == i) digrams_.erase(it);
    }

    // ── linking ──
    // Reconnect left→right.  Breaking left's previous adjacency drops its
    // index entry; when that adjacency sat inside a run of one repeated
    // symbol, a surviving overlapping pair may have been skipped as an
    // overlap earlier — queue it for re-checking so runs are not forgotten.
    void join(int left, int right) {
        if (nodes_[left].next != -1) {
            unindex_at(left);

            int rp = nodes_[right].prev, rn = nodes_[right].next;
            if (rp != -1 && rn != -1 && !is_guard(right) && !is_guard(rp) && !is_guard(rn) &&
                nodes_[right].sym != kBoundaryCode &&
                nodes_[right].sym == nodes_[rp].sym && nodes_[right].sym == nodes_[rn].sym)
                push_dirty(right);

            int lp = nodes_[left].prev, ln = nodes_[left].next;
            if (lp != -1 && ln != -1 && !is_guard(left) && !is_guard(lp) && !is_guard(ln) &&
                nodes_[left].sym != kBoundaryCode &&
                nodes_[left].sym == nodes_[lp].sym && nodes_[left].sym == nodes_[ln].sym)
                push_dirty(lp);
        }
        nodes_[left].next = right;
        nodes_[right].prev = left;
    }

    void remove_node(int i) {
        unindex_at(i);
        join(nodes_[i].prev, nodes_[i].next);
        Code c = nodes_[i].sym;
        if (is_rule_code(c)) rules_[rule_of(c)].refs--;
        free_node(i);
    }

    // ── enforcement ──
    void push_dirty(int i) { work_.emplace_back(i, nodes_[i].gen); }

    void drain() {
        while (!work_.empty()) {
            auto [i, gen] = work_.front();
            work_.pop_front();
            if (nodes_[i].gen != gen || nodes_[i].next == -1) continue;
            check(i);
        }
    }

    /// Enforce digram uniqueness for the digram starting at node i.
    void check(int i) {
        if (!indexable(i)) return;
        int j = nodes_[i].next;
        const std::uint64_t key = digram_key(nodes_[i].sym, nodes_[j].sym);
        auto it = digrams_.find(key);
        if (it == digrams_.end()) {
            digrams_[key] = i;
            return;
        }
        int q = it->second;
        if (q == i) return;
        if (nodes_[q].next == i || nodes_[i].next == q) return;   // overlapping run pair
        match(i, q);
    }

    bool spans_complete_body(int i) const {
        int j = nodes_[i].next;
        return is_guard(nodes_[i].prev) && j != -1 && nodes_[j].next != -1 &&
               is_guard(nodes_[j].next);
    }

    /// The digram at i repeats the indexed occurrence at q: replace with a
    /// rule reference, reusing an existing rule when one side is exactly a
    /// two-symbol rule body.
    void match(int i, int q) {
        // Prefer an existing complete body as the canonical side so no rule
        // body ever shrinks to a bare reference.
        if (!spans_complete_body(q) && spans_complete_body(i)) std::swap(i, q);

        int rule_id;
        if (spans_complete_body(q)) {
            rule_id = nodes_[nodes_[q].prev].guard_of;
            substitute(i, rule_id);
        } else {
            const Code a = nodes_[i].sym;
            const Code b = nodes_[nodes_[i].next].sym;
            rule_id = static_cast<int>(rules_.size());
            rules_.push_back(RuleRec{});
            rules_[rule_id].guard = new_guard(rule_id);
            rules_[rule_id].alive = true;
            const int g = rules_[rule_id].guard;
            const int n1 = new_node(a);
            const int n2 = new_node(b);
            join(g, n1);
            join(n1, n2);
            join(n2, g);
            if (is_rule_code(a)) rules_[rule_of(a)].refs++;
            if (is_rule_code(b)) rules_[rule_of(b)].refs++;
            substitute(q, rule_id);
            substitute(i, rule_id);
            digrams_[digram_key(a, b)] = n1;
        }

        // Rule utility: substitution may have left a rule with a single
        // remaining reference, which now sits in rule_id's body.  Inline any
        // such rule (re-walking after each splice, since splices add symbols).
        bool changed = true;
        while (changed) {
            changed = false;
            const int g = rules_[rule_id].guard;
            for (int n = nodes_[g].next; !is_guard(n); n = nodes_[n].next) {
                Code c = nodes_[n].sym;
                if (is_rule_code(c) && rules_[rule_of(c)].refs == 1) {
                    inline_rule_at(n);
                    changed = true;
                    break;
                }
            }
        }
    }

    /// Replace the digram starting at `first` with a reference to rule_id.
    void substitute(int first, int rule_id) {
        const int left = nodes_[first].prev;
        const int second = nodes_[first].next;
        remove_node(first);
        remove_node(second);
        const int ref = new_node(code_of_rule(rule_id));
        rules_[rule_id].refs++;
        const int right = nodes_[left].next;
        join(left, ref);
        join(ref, right);
        push_dirty(left);
        push_dirty(ref);
    }

    /// Inline the body of a single-use rule at its last reference `ref`.
    void inline_rule_at(int ref) {
        const int rid = rule_of(nodes_[ref].sym);
        const int left = nodes_[ref].prev;
        const int right = nodes_[ref].next;
        const int g = rules_[rid].guard;
        const int first = nodes_[g].next;
        const int last = nodes_[g].prev;

        unindex_at(ref);
        join(left, right);
        free_node(ref);
        join(left, first);
        join(last, right);
        free_node(g);
        rules_[rid].alive = false;
        rules_[rid].refs = 0;

        push_dirty(left);
        push_dirty(last);
    }

    template <typename F>
    std::vector<Symbol> body_of(int rule_id, F to_symbol) const {
        std::vector<Symbol> out;
        const int g = rules_[rule_id].guard;
        for (int n = nodes_[g].next; !is_guard(n); n = nodes_[n].next)
            out.push_back(to_symbol(nodes_[n].sym));
        return out;
    }
};

} // namespace

Grammar induce(const Corpus& corpus) {
    validate_corpus(corpus);
    Builder b;
    for (const Symbol& s : corpus.symbols) {
        if (s.is_boundary()) b.append(kBoundaryCode);
        else b.append(static_cast<Code>(s.id));
    }
    return b.export_grammar();
}

// ─── Expansion ───────────────────────────────────────────────────────────────

namespace {

void expand_into(const Grammar& g, const std::vector<Symbol>& body,
                 std::vector<Symbol>& out, std::vector<char>& visiting) {
    for (const Symbol& s : body) {
        if (!s.is_rule()) {
            out.push_back(s);
            continue;
        }
        auto it = g.rules.find(s.id);
        if (it == g.rules.end())
            throw InputError("undefined rule reference R" + std::to_string(s.id));
        if (s.id >= 0 && s.id < static_cast<int>(visiting.size()) && visiting[s.id])
            throw InputError("cyclic grammar");
        if (s.id >= static_cast<int>(visiting.size())) visiting.resize(s.id + 1, 0);
        visiting[s.id] = 1;
        expand_into(g, it->second, out, visiting);
        visiting[s.id] = 0;
    }
}

} // namespace

Corpus expand(const Grammar& grammar) {
    Corpus c;
    std::vector<char> visiting;
    expand_into(grammar, grammar.start, c.symbols, visiting);
    c.episode_count = 1;
    for (const Symbol& s : c.symbols)
        if (s.is_boundary()) c.episode_count++;
    return c;
}

// ─── Validation ──────────────────────────────────────────────────────────────

void validate_grammar(const Grammar& grammar) {
    // boundary placement and body sizes
    for (const auto& [id, body] : grammar.rules) {
        if (body.size() < 2)
            throw InputError("rule R" + std::to_string(id) + " has body length < 2");
        for (const Symbol& s : body)
            if (s.is_boundary())
                throw InputError("rule R" + std::to_string(id) + " contains a boundary");
    }
    // reference counts
    std::map<int, int> refs;
    auto count_refs = [&](const std::vector<Symbol>& body) {
        for (const Symbol& s : body)
            if (s.is_rule()) {
                if (!grammar.rules.count(s.id))
                    throw InputError("undefined rule reference R" + std::to_string(s.id));
                refs[s.id]++;
            }
    };
    count_refs(grammar.start);
    for (const auto& [id, body] : grammar.rules) count_refs(body);
    for (const auto& [id, body] : grammar.rules)
        if (refs[id] < 2)
            throw InputError("rule R" + std::to_string(id) + " referenced fewer than twice");

    // digram uniqueness (self-overlapping runs exempt): collect positions per
    // digram over every sequence; duplicates must form one consecutive run of
    // a repeated symbol within a single sequence.
    struct Occ { int seq; int pos; };
    std::map<std::pair<Symbol, Symbol>, std::vector<Occ>> occ;
    int seq_id = 0;
    auto scan = [&](const std::vector<Symbol>& body) {
        for (size_t p = 0; p + 1 < body.size(); ++p) {
            if (body[p].is_boundary() || body[p + 1].is_boundary()) continue;
            occ[{body[p], body[p + 1]}].push_back({seq_id, static_cast<int>(p)});
        }
        seq_id++;
    };
    scan(grammar.start);
    for (const auto& [id, body] : grammar.rules) scan(body);
    for (const auto& [dg, v] : occ) {
        if (v.size() < 2) continue;
        bool run_ok = dg.first == dg.second;
        for (size_t i = 0; run_ok && i + 1 < v.size(); ++i)
            run_ok = v[i].seq == v[i + 1].seq && v[i + 1].pos == v[i].pos + 1;
        if (!run_ok)
            throw InputError("repeated digram outside a self-overlapping run");
    }
}

// ─── Parse trees ─────────────────────────────────────────────────────────────

namespace {

TreeNode node_for(const Grammar& g, const Symbol& s, std::vector<char>& visiting) {
    if (s.is_terminal()) return TreeNode{true, s.id, {}};
    if (!s.is_rule()) throw InputError("boundary inside an episode slice");
    auto it = g.rules.find(s.id);
    if (it == g.rules.end())
        throw InputError("undefined rule reference R" + std::to_string(s.id));
    if (s.id < static_cast<int>(visiting.size()) && visiting[s.id])
        throw InputError("cyclic grammar");
    if (s.id >= static_cast<int>(visiting.size())) visiting.resize(s.id + 1, 0);
    visiting[s.id] = 1;
    TreeNode n{false, s.id, {}};
    for (const Symbol& c : it->second) n.children.push_back(node_for(g, c, visiting));
    visiting[s.id] = 0;
    return n;
}

} // namespace

std::vector<EpisodeTree> parse_trees(const Grammar& grammar) {
    std::vector<EpisodeTree> out;
    std::vector<std::vector<Symbol>> slices(1);
    for (const Symbol& s : grammar.start) {
        if (s.is_boundary()) slices.emplace_back();
        else slices.back().push_back(s);
    }
    std::vector<char> visiting;
    for (size_t e = 0; e < slices.size(); ++e) {
        if (slices[e].empty()) throw InputError("empty episode slice in start sequence");
        EpisodeTree t;
        t.episode_index = static_cast<int>(e);
        t.root = TreeNode{false, -1, {}};
        for (const Symbol& s : slices[e]) t.root.children.push_back(node_for(grammar, s, visiting));
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<int> leaf_frontier(const EpisodeTree& tree) {
    std::vector<int> out;
    // iterative preorder; children visited left to right
    std::vector<const TreeNode*> stack{&tree.root};
    while (!stack.empty()) {
        const TreeNode* n = stack.back();
        stack.pop_back();
        if (n->leaf) {
            out.push_back(n->id);
            continue;
        }
        for (auto it = n->children.rbegin(); it != n->children.rend(); ++it)
            stack.push_back(&*it);
    }
    return out;
}

// ─── Serialization ───────────────────────────────────────────────────────────

namespace {

std::string symbol_text(const Symbol& s) {
    switch (s.kind) {
        case Symbol::Kind::Terminal: return "t" + std::to_string(s.id);
        case Symbol::Kind::Rule: return "R" + std::to_string(s.id);
        default: return "|";
    }
}

void append_production(std::string& out, const std::string& head,
                       const std::vector<Symbol>& body) {
    out += head;
    out += " ->";
    for (const Symbol& s : body) {
        out += ' ';
        out += symbol_text(s);
    }
    out += '\n';
}

} // namespace

std::string grammar_to_text(const Grammar& grammar) {
    std::string out;
    append_production(out, "S0", grammar.start);
    for (const auto& [id, body] : grammar.rules)
        append_production(out, "R" + std::to_string(id), body);
    return out;
}

std::string grammar_to_json(const Grammar& grammar) {
    std::ostringstream os;
    auto body_json = [&](const std::vector<Symbol>& body) {
        os << '[';
        for (size_t i = 0; i < body.size(); ++i) {
            if (i) os << ',';
            os << '"' << symbol_text(body[i]) << '"';
        }
        os << ']';
    };
    os << "{\"start\":";
    body_json(grammar.start);
    os << ",\"rules\":{";
    bool first = true;
    for (const auto& [id, body] : grammar.rules) {
        if (!first) os << ',';
        first = false;
        os << "\"R" << id << "\":";
        body_json(body);
    }
    os << "}}";
    return os.str();
}

namespace {

void dot_node(std::ostringstream& os, const TreeNode& n, int& counter, int parent,
              const std::vector<std::string>& names) {
    const int me = counter++;
    std::string label;
    if (n.leaf)
        label = (n.id >= 0 && n.id < static_cast<int>(names.size()))
                    ? names[n.id]
                    : "skill_" + std::to_string(n.id);
    else if (n.id < 0)
        label = "episode";
    else
        label = "R" + std::to_string(n.id);
    os << "  n" << me << " [label=\"" << label << "\"";
    if (n.leaf) os << " shape=box";
    os << "];\n";
    if (parent >= 0) os << "  n" << parent << " -> n" << me << ";\n";
    for (const TreeNode& c : n.children) dot_node(os, c, counter, me, names);
}

} // namespace

std::string tree_to_dot(const EpisodeTree& tree, const std::vector<std::string>& skill_names) {
    std::ostringstream os;
    os << "digraph episode_" << tree.episode_index << " {\n";
    int counter = 0;
    dot_node(os, tree.root, counter, -1, skill_names);
    os << "}\n";
    return os.str();
}

} // namespace hisd
