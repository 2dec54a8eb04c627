#include "vcnet/automaton.hpp"

#include "vcnet/errors.hpp"
#include "vcnet/net.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace vcnet {

std::size_t word_automaton::num_edges() const
{
    std::size_t n = 0;
    for (const auto& es : out)
        n += es.size();
    return n;
}

std::size_t word_automaton::add_state(std::string name, bool init, bool acc)
{
    state_names.push_back(std::move(name));
    initial.push_back(init);
    accepting.push_back(acc);
    out.emplace_back();
    return state_names.size() - 1;
}

void word_automaton::add_edge(std::size_t src, letter label, std::size_t dst)
{
    out[src].push_back({label, dst});
}

void word_automaton::normalize()
{
    for (auto& es : out) {
        std::sort(es.begin(), es.end(),
                  [](const edge& a, const edge& b) { return std::tie(a.label, a.dst) < std::tie(b.label, b.dst); });
        es.erase(std::unique(es.begin(), es.end()), es.end());
    }
}

namespace {

std::vector<std::size_t> step(const word_automaton& a, const std::vector<std::size_t>& current, letter l)
{
    std::set<std::size_t> next;
    for (std::size_t s : current)
        for (const auto& e : a.out[s])
            if (e.label == l)
                next.insert(e.dst);
    return {next.begin(), next.end()};
}

} // namespace

bool accepts(const word_automaton& a, const std::vector<letter>& word)
{
    std::vector<std::size_t> current;
    for (std::size_t s = 0; s < a.size(); ++s)
        if (a.initial[s])
            current.push_back(s);
    for (letter l : word)
        current = step(a, current, l);
    return std::any_of(current.begin(), current.end(), [&](std::size_t s) { return a.accepting[s]; });
}

bool accepts(const word_automaton& a, const lasso& word)
{
    if (word.loop.empty())
        throw error("lasso loop must be nonempty");
    std::vector<letter> flat = word.prefix;
    flat.insert(flat.end(), word.loop.begin(), word.loop.end());
    const std::size_t len = flat.size();
    auto succ_pos = [&](std::size_t i) { return i + 1 < len ? i + 1 : word.prefix.size(); };
    // Product nodes state * len + position.
    auto successors = [&](std::size_t v) {
        const std::size_t s = v / len, i = v % len;
        std::vector<std::size_t> out;
        for (const auto& e : a.out[s])
            if (e.label == flat[i])
                out.push_back(e.dst * len + succ_pos(i));
        return out;
    };
    auto reach_from = [&](const std::vector<std::size_t>& seeds) {
        std::vector<bool> seen(a.size() * len, false);
        std::deque<std::size_t> work;
        for (std::size_t v : seeds)
            if (!seen[v]) {
                seen[v] = true;
                work.push_back(v);
            }
        while (!work.empty()) {
            const std::size_t v = work.front();
            work.pop_front();
            for (std::size_t w : successors(v))
                if (!seen[w]) {
                    seen[w] = true;
                    work.push_back(w);
                }
        }
        return seen;
    };
    std::vector<std::size_t> init;
    for (std::size_t s = 0; s < a.size(); ++s)
        if (a.initial[s])
            init.push_back(s * len);
    const auto reachable = reach_from(init);
    for (std::size_t v = 0; v < reachable.size(); ++v) {
        if (!reachable[v] || !a.accepting[v / len])
            continue;
        if (reach_from(successors(v))[v])
            return true;
    }
    return false;
}

namespace {

// Negation normal form with hash-consed nodes. Weak next only arises in the
// finite-word translation.
enum class nk { tt, ff, pos, neg, end, nend, conj, disj, next, wnext, until, release };

struct nnf_node
{
    nk kind;
    int prop;
    int a;
    int b;
};

enum class last_flag : std::uint8_t { any, must_last, must_not_last };

struct move
{
    std::vector<int> next;
    last_flag last;
    friend bool operator<(const move& x, const move& y) { return std::tie(x.next, x.last) < std::tie(y.next, y.last); }
    friend bool operator==(const move& x, const move& y) = default;
};

class tableau
{
public:
    tableau(const formula& f, automaton_kind kind) : kind_{kind}, props_{atoms(f)}
    {
        if (props_.size() > 16)
            throw error("formula has too many atoms for explicit alphabet enumeration");
        root_ = build(f, false);
    }

    word_automaton nfa()
    {
        word_automaton a;
        a.kind = automaton_kind::finite;
        a.props = props_;
        const std::size_t acc = a.add_state("acc", false, true);
        std::map<std::vector<int>, std::size_t> ids;
        std::deque<std::vector<int>> work;
        auto state_of = [&](const std::vector<int>& obligations) {
            auto it = ids.find(obligations);
            if (it != ids.end())
                return it->second;
            const std::size_t id = a.add_state("q" + std::to_string(ids.size()));
            ids.emplace(obligations, id);
            work.push_back(obligations);
            return id;
        };
        a.initial[state_of(initial_set())] = true;
        while (!work.empty()) {
            const auto obligations = work.front();
            work.pop_front();
            const std::size_t src = ids.at(obligations);
            for (letter l = 0; l < (letter{1} << props_.size()); ++l) {
                for (const auto& m : joint_moves(obligations, l)) {
                    if (m.last != last_flag::must_not_last && m.next.empty())
                        a.add_edge(src, l, acc);
                    if (m.last != last_flag::must_last)
                        a.add_edge(src, l, state_of(m.next));
                }
            }
        }
        a.normalize();
        return a;
    }

    word_automaton buchi()
    {
        word_automaton a;
        a.kind = automaton_kind::buchi;
        a.props = props_;
        using mh_state = std::pair<std::vector<int>, std::vector<int>>;
        std::map<mh_state, std::size_t> ids;
        std::deque<mh_state> work;
        auto state_of = [&](const mh_state& s) {
            auto it = ids.find(s);
            if (it != ids.end())
                return it->second;
            const std::size_t id = a.add_state("q" + std::to_string(ids.size()), false, s.second.empty());
            ids.emplace(s, id);
            work.push_back(s);
            return id;
        };
        a.initial[state_of({initial_set(), {}})] = true;
        while (!work.empty()) {
            const auto [set, owing] = work.front();
            work.pop_front();
            const std::size_t src = ids.at({set, owing});
            for (letter l = 0; l < (letter{1} << props_.size()); ++l) {
                std::vector<std::vector<move>> choices;
                bool dead = false;
                for (int f : set) {
                    auto ms = expand(f, l);
                    std::erase_if(ms, [](const move& m) { return m.last == last_flag::must_last; });
                    if (ms.empty()) {
                        dead = true;
                        break;
                    }
                    choices.push_back(std::move(ms));
                }
                if (dead)
                    continue;
                // Enumerate one move per obligation.
                std::vector<std::size_t> pick(choices.size(), 0);
                while (true) {
                    std::set<int> next, owed;
                    for (std::size_t i = 0; i < choices.size(); ++i) {
                        const auto& m = choices[i][pick[i]];
                        next.insert(m.next.begin(), m.next.end());
                        if (std::binary_search(owing.begin(), owing.end(), set[i]))
                            owed.insert(m.next.begin(), m.next.end());
                    }
                    const std::set<int>& source = owing.empty() ? next : owed;
                    std::vector<int> owing_next;
                    for (int g : source)
                        if (nodes_[static_cast<std::size_t>(g)].kind == nk::until)
                            owing_next.push_back(g);
                    a.add_edge(src, l, state_of({{next.begin(), next.end()}, owing_next}));
                    std::size_t i = 0;
                    while (i < pick.size() && ++pick[i] == choices[i].size())
                        pick[i++] = 0;
                    if (i == pick.size())
                        break;
                }
            }
        }
        a.normalize();
        return a;
    }

private:
    std::vector<int> initial_set() const
    {
        if (nodes_[static_cast<std::size_t>(root_)].kind == nk::tt)
            return {};
        return {root_};
    }

    int make(nk kind, int prop = -1, int a = -1, int b = -1)
    {
        if (kind == nk::conj) {
            if (kind_of(a) == nk::ff || kind_of(b) == nk::ff)
                return make(nk::ff);
            if (kind_of(a) == nk::tt)
                return b;
            if (kind_of(b) == nk::tt)
                return a;
        }
        if (kind == nk::disj) {
            if (kind_of(a) == nk::tt || kind_of(b) == nk::tt)
                return make(nk::tt);
            if (kind_of(a) == nk::ff)
                return b;
            if (kind_of(b) == nk::ff)
                return a;
        }
        const auto key = std::make_tuple(static_cast<int>(kind), prop, a, b);
        auto it = index_.find(key);
        if (it != index_.end())
            return it->second;
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back({kind, prop, a, b});
        index_.emplace(key, id);
        return id;
    }
    nk kind_of(int id) const { return nodes_[static_cast<std::size_t>(id)].kind; }

    int build(const formula& f, bool negated)
    {
        const bool finite = kind_ == automaton_kind::finite;
        switch (f->op) {
        case ltl_op::tt:
            return make(negated ? nk::ff : nk::tt);
        case ltl_op::ff:
            return make(negated ? nk::tt : nk::ff);
        case ltl_op::end:
            if (!finite)
                return make(negated ? nk::tt : nk::ff);
            return make(negated ? nk::nend : nk::end);
        case ltl_op::atom: {
            const int p = static_cast<int>(std::find(props_.begin(), props_.end(), f->atom) - props_.begin());
            return make(negated ? nk::neg : nk::pos, p);
        }
        case ltl_op::negation:
            return build(f->lhs, !negated);
        case ltl_op::conjunction:
            return make(negated ? nk::disj : nk::conj, -1, build(f->lhs, negated), build(f->rhs, negated));
        case ltl_op::disjunction:
            return make(negated ? nk::conj : nk::disj, -1, build(f->lhs, negated), build(f->rhs, negated));
        case ltl_op::implication:
            return make(negated ? nk::conj : nk::disj, -1, build(f->lhs, !negated), build(f->rhs, negated));
        case ltl_op::next:
            return make(negated && finite ? nk::wnext : nk::next, -1, build(f->lhs, negated));
        case ltl_op::until:
            return make(negated ? nk::release : nk::until, -1, build(f->lhs, negated), build(f->rhs, negated));
        case ltl_op::release:
            return make(negated ? nk::until : nk::release, -1, build(f->lhs, negated), build(f->rhs, negated));
        case ltl_op::eventually:
            return negated ? make(nk::release, -1, make(nk::ff), build(f->lhs, true))
                           : make(nk::until, -1, make(nk::tt), build(f->lhs, false));
        case ltl_op::always:
            return negated ? make(nk::until, -1, make(nk::tt), build(f->lhs, true))
                           : make(nk::release, -1, make(nk::ff), build(f->lhs, false));
        }
        throw error("malformed formula");
    }

    static std::vector<move> combine(const std::vector<move>& xs, const std::vector<move>& ys)
    {
        std::vector<move> out;
        for (const auto& x : xs)
            for (const auto& y : ys) {
                last_flag flag = x.last;
                if (y.last != last_flag::any) {
                    if (flag != last_flag::any && flag != y.last)
                        continue;
                    flag = y.last;
                }
                move m{x.next, flag};
                m.next.insert(m.next.end(), y.next.begin(), y.next.end());
                std::sort(m.next.begin(), m.next.end());
                m.next.erase(std::unique(m.next.begin(), m.next.end()), m.next.end());
                out.push_back(std::move(m));
            }
        return tidy(std::move(out));
    }
    static std::vector<move> tidy(std::vector<move> ms)
    {
        std::sort(ms.begin(), ms.end());
        ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
        return ms;
    }
    std::vector<move> obligation(int f, last_flag flag) const
    {
        if (kind_of(f) == nk::tt)
            return {{{}, flag}};
        return {{{f}, flag}};
    }

    const std::vector<move>& expand(int f, letter l)
    {
        const auto key = std::make_pair(f, l);
        if (auto it = memo_.find(key); it != memo_.end())
            return it->second;
        const nnf_node n = nodes_[static_cast<std::size_t>(f)];
        std::vector<move> ms;
        switch (n.kind) {
        case nk::tt:
            ms = {{{}, last_flag::any}};
            break;
        case nk::ff:
            break;
        case nk::pos:
            if ((l >> n.prop) & 1U)
                ms = {{{}, last_flag::any}};
            break;
        case nk::neg:
            if (!((l >> n.prop) & 1U))
                ms = {{{}, last_flag::any}};
            break;
        case nk::end:
            ms = {{{}, last_flag::must_last}};
            break;
        case nk::nend:
            ms = {{{}, last_flag::must_not_last}};
            break;
        case nk::conj:
            ms = combine(expand(n.a, l), expand(n.b, l));
            break;
        case nk::disj: {
            ms = expand(n.a, l);
            const auto& rest = expand(n.b, l);
            ms.insert(ms.end(), rest.begin(), rest.end());
            ms = tidy(std::move(ms));
            break;
        }
        case nk::next:
            ms = obligation(n.a, last_flag::must_not_last);
            break;
        case nk::wnext:
            ms = obligation(n.a, last_flag::must_not_last);
            ms.push_back({{}, last_flag::must_last});
            ms = tidy(std::move(ms));
            break;
        case nk::until: {
            ms = expand(n.b, l);
            const auto cont = combine(expand(n.a, l), obligation(f, last_flag::must_not_last));
            ms.insert(ms.end(), cont.begin(), cont.end());
            ms = tidy(std::move(ms));
            break;
        }
        case nk::release: {
            auto either = expand(n.a, l);
            either.push_back({{}, last_flag::must_last});
            const auto again = obligation(f, last_flag::must_not_last);
            either.insert(either.end(), again.begin(), again.end());
            ms = combine(expand(n.b, l), tidy(std::move(either)));
            break;
        }
        }
        return memo_.emplace(key, std::move(ms)).first->second;
    }

    std::vector<move> joint_moves(const std::vector<int>& set, letter l)
    {
        std::vector<move> acc{{{}, last_flag::any}};
        for (int f : set) {
            acc = combine(acc, expand(f, l));
            if (acc.empty())
                break;
        }
        return acc;
    }

    automaton_kind kind_;
    std::vector<std::string> props_;
    std::vector<nnf_node> nodes_;
    std::map<std::tuple<int, int, int, int>, int> index_;
    std::map<std::pair<int, letter>, std::vector<move>> memo_;
    int root_ = -1;
};

} // namespace

word_automaton ltl_to_nfa(const formula& f)
{
    return tableau(f, automaton_kind::finite).nfa();
}

word_automaton ltl_to_buchi(const formula& f)
{
    return tableau(f, automaton_kind::buchi).buchi();
}

word_automaton determinize(const word_automaton& a)
{
    if (a.kind != automaton_kind::finite)
        throw error("only finite-word automata can be determinized");
    if (a.props.size() > 16)
        throw error("alphabet too large to determinize");
    word_automaton d;
    d.kind = automaton_kind::finite;
    d.props = a.props;
    std::map<std::vector<std::size_t>, std::size_t> ids;
    std::deque<std::vector<std::size_t>> work;
    auto state_of = [&](const std::vector<std::size_t>& set) {
        auto it = ids.find(set);
        if (it != ids.end())
            return it->second;
        const bool acc = std::any_of(set.begin(), set.end(), [&](std::size_t s) { return a.accepting[s]; });
        const std::size_t id = d.add_state("d" + std::to_string(ids.size()), false, acc);
        ids.emplace(set, id);
        work.push_back(set);
        return id;
    };
    std::vector<std::size_t> init;
    for (std::size_t s = 0; s < a.size(); ++s)
        if (a.initial[s])
            init.push_back(s);
    d.initial[state_of(init)] = true;
    while (!work.empty()) {
        const auto set = work.front();
        work.pop_front();
        const std::size_t src = ids.at(set);
        for (letter l = 0; l < (letter{1} << a.props.size()); ++l)
            d.add_edge(src, l, state_of(step(a, set, l)));
    }
    d.normalize();
    return d;
}

std::string format_letter(const std::vector<std::string>& props, letter l)
{
    std::string out = "{";
    bool first = true;
    for (std::size_t i = 0; i < props.size(); ++i)
        if ((l >> i) & 1U) {
            if (!first)
                out += ',';
            out += props[i];
            first = false;
        }
    return out + "}";
}

word_automaton parse_automaton(std::string_view text, automaton_kind default_kind)
{
    struct pending_edge
    {
        std::string src, dst;
        std::vector<std::string> label;
        std::size_t line;
    };
    word_automaton a;
    a.kind = default_kind;
    std::optional<std::vector<std::string>> alphabet;
    std::map<std::string, std::size_t> state_ids;
    std::vector<pending_edge> edges;

    std::size_t line_no = 0, pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos)
            eol = text.size();
        std::string line(text.substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        if (auto h = line.find('#'); h != std::string::npos)
            line.erase(h);
        auto fail = [&](const std::string& msg) {
            throw parse_error(line_no, "line " + std::to_string(line_no) + ": " + msg);
        };
        std::istringstream in(line);
        std::string kw;
        if (!(in >> kw))
            continue;
        if (kw == "kind") {
            std::string k;
            in >> k;
            if (k == "finite")
                a.kind = automaton_kind::finite;
            else if (k == "buchi")
                a.kind = automaton_kind::buchi;
            else
                fail("expected 'kind finite' or 'kind buchi'");
        } else if (kw == "alphabet") {
            std::vector<std::string> ids;
            for (std::string id; in >> id;)
                ids.push_back(id);
            alphabet = ids;
        } else if (kw == "state") {
            std::string id;
            if (!(in >> id) || !is_identifier(id))
                fail("expected 'state <id> [init] [acc]'");
            if (state_ids.count(id))
                fail("duplicate state '" + id + "'");
            bool init = false, acc = false;
            for (std::string flag; in >> flag;) {
                if (flag == "init")
                    init = true;
                else if (flag == "acc")
                    acc = true;
                else
                    fail("unknown state flag '" + flag + "'");
            }
            state_ids[id] = a.add_state(id, init, acc);
        } else if (kw == "edge") {
            const auto open = line.find('{'), close = line.find('}');
            if (open == std::string::npos || close == std::string::npos || close < open)
                fail("expected 'edge <src> {<id>*} <dst>'");
            std::istringstream head(line.substr(0, open)), body(line.substr(open + 1, close - open - 1)),
                tail(line.substr(close + 1));
            std::string skip, src, dst, extra;
            head >> skip >> src;
            tail >> dst;
            if (src.empty() || dst.empty() || (head >> extra) || (tail >> extra))
                fail("expected 'edge <src> {<id>*} <dst>'");
            std::string inner = body.str();
            std::replace(inner.begin(), inner.end(), ',', ' ');
            std::istringstream ids(inner);
            pending_edge e{src, dst, {}, line_no};
            for (std::string id; ids >> id;)
                e.label.push_back(id);
            edges.push_back(std::move(e));
        } else {
            fail("unknown directive '" + kw + "'");
        }
    }

    if (alphabet) {
        a.props = *alphabet;
    } else {
        std::set<std::string> seen;
        for (const auto& e : edges)
            seen.insert(e.label.begin(), e.label.end());
        a.props.assign(seen.begin(), seen.end());
    }
    if (a.props.size() > 63)
        throw error("automaton alphabet has too many propositions");
    for (const auto& e : edges) {
        auto where = [&](const std::string& msg) {
            return parse_error(e.line, "line " + std::to_string(e.line) + ": " + msg);
        };
        auto s = state_ids.find(e.src), d = state_ids.find(e.dst);
        if (s == state_ids.end())
            throw where("undeclared state '" + e.src + "'");
        if (d == state_ids.end())
            throw where("undeclared state '" + e.dst + "'");
        letter l = 0;
        for (const auto& id : e.label) {
            auto it = std::find(a.props.begin(), a.props.end(), id);
            if (it == a.props.end())
                throw where("'" + id + "' is not in the alphabet");
            l |= letter{1} << (it - a.props.begin());
        }
        a.add_edge(s->second, l, d->second);
    }
    a.normalize();
    return a;
}

word_automaton read_automaton_file(const std::string& path, automaton_kind default_kind)
{
    std::ifstream in(path);
    if (!in)
        throw error("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_automaton(ss.str(), default_kind);
}

std::string format_automaton(const word_automaton& a)
{
    std::string out = a.kind == automaton_kind::finite ? "kind finite\n" : "kind buchi\n";
    out += "alphabet";
    for (const auto& p : a.props)
        out += ' ' + p;
    out += '\n';
    for (std::size_t s = 0; s < a.size(); ++s) {
        out += "state " + a.state_names[s];
        if (a.initial[s])
            out += " init";
        if (a.accepting[s])
            out += " acc";
        out += '\n';
    }
    for (std::size_t s = 0; s < a.size(); ++s)
        for (const auto& e : a.out[s])
            out += "edge " + a.state_names[s] + ' ' + format_letter(a.props, e.label) + ' ' + a.state_names[e.dst] +
                   '\n';
    return out;
}

} // namespace vcnet
