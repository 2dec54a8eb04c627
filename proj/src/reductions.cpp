#include "vcnet/reductions.hpp"

#include "vcnet/errors.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace vcnet {

namespace {

std::vector<std::string> split_words(const std::string& line)
{
    std::istringstream in(line);
    std::vector<std::string> out;
    for (std::string w; in >> w;)
        out.push_back(w);
    return out;
}

std::string strip_comment(std::string line)
{
    if (auto h = line.find('#'); h != std::string::npos)
        line.resize(h);
    return line;
}

[[noreturn]] void fail(std::size_t line, const std::string& what)
{
    throw parse_error(line, "line " + std::to_string(line) + ": " + what);
}

long long to_int(const std::string& w, std::size_t line)
{
    try {
        std::size_t used = 0;
        const long long v = std::stoll(w, &used);
        if (used != w.size())
            fail(line, "expected an integer, got '" + w + "'");
        return v;
    } catch (const std::logic_error&) {
        fail(line, "expected an integer, got '" + w + "'");
    }
}

std::size_t to_count(const std::string& w, std::size_t line)
{
    const long long v = to_int(w, line);
    if (v < 0)
        fail(line, "expected a nonnegative integer, got '" + w + "'");
    return static_cast<std::size_t>(v);
}

std::string var_name(std::size_t i) { return "v" + std::to_string(i); }

} // namespace

pwsat_instance parse_pwsat(std::string_view text)
{
    pwsat_instance inst;
    std::istringstream in{std::string(text)};
    std::optional<std::size_t> declared_clauses;
    bool header = false;
    std::map<std::size_t, std::size_t> parts, targets;
    std::size_t lineno = 0;
    for (std::string raw; std::getline(in, raw);) {
        ++lineno;
        const auto w = split_words(strip_comment(raw));
        if (w.empty() || w[0] == "c")
            continue;
        if (w[0] == "p") {
            if (header)
                fail(lineno, "second header");
            if (w.size() != 4 || w[1] != "cnf")
                fail(lineno, "expected 'p cnf <vars> <clauses>'");
            inst.num_vars = to_count(w[2], lineno);
            declared_clauses = to_count(w[3], lineno);
            inst.part.assign(inst.num_vars, 0);
            header = true;
            continue;
        }
        if (!header)
            fail(lineno, "missing 'p cnf' header");
        if (w[0] == "part") {
            if (w.size() != 3)
                fail(lineno, "expected 'part <var> <index>'");
            const std::size_t v = to_count(w[1], lineno), r = to_count(w[2], lineno);
            if (v < 1 || v > inst.num_vars)
                fail(lineno, "unknown variable " + w[1]);
            if (r < 1)
                fail(lineno, "part indices start at 1");
            if (!parts.emplace(v, r).second)
                fail(lineno, "variable " + w[1] + " already has a part");
        } else if (w[0] == "tg") {
            if (w.size() != 3)
                fail(lineno, "expected 'tg <index> <count>'");
            const std::size_t r = to_count(w[1], lineno);
            if (r < 1)
                fail(lineno, "part indices start at 1");
            if (!targets.emplace(r, to_count(w[2], lineno)).second)
                fail(lineno, "part " + w[1] + " already has a target");
        } else if (w[0] == "bag") {
            if (!inst.decomposition)
                inst.decomposition.emplace();
            std::vector<std::size_t> bag;
            for (std::size_t i = 1; i < w.size(); ++i) {
                const std::size_t v = to_count(w[i], lineno);
                if (v < 1 || v > inst.num_vars)
                    fail(lineno, "unknown variable " + w[i]);
                bag.push_back(v);
            }
            std::sort(bag.begin(), bag.end());
            bag.erase(std::unique(bag.begin(), bag.end()), bag.end());
            inst.decomposition->push_back(std::move(bag));
        } else {
            std::vector<int> clause;
            for (std::size_t i = 0; i < w.size(); ++i) {
                const long long lit = to_int(w[i], lineno);
                if (lit == 0) {
                    if (i + 1 != w.size())
                        fail(lineno, "literals after the terminating 0");
                    break;
                }
                if (i + 1 == w.size())
                    fail(lineno, "clause must end with 0");
                const auto mag = static_cast<std::size_t>(lit < 0 ? -lit : lit);
                if (mag > inst.num_vars)
                    fail(lineno, "unknown variable " + std::to_string(mag));
                clause.push_back(static_cast<int>(lit));
            }
            inst.clauses.push_back(std::move(clause));
        }
    }
    if (!header)
        fail(lineno, "missing 'p cnf' header");
    if (declared_clauses && *declared_clauses != inst.clauses.size())
        throw malformed_instance("header declares " + std::to_string(*declared_clauses) + " clauses, found " +
                                 std::to_string(inst.clauses.size()));
    std::size_t k = 0;
    for (auto [v, r] : parts)
        k = std::max(k, r);
    for (auto [r, c] : targets)
        k = std::max(k, r);
    for (auto [v, r] : parts)
        inst.part[v - 1] = r;
    inst.target.assign(k, 0);
    for (std::size_t r = 1; r <= k; ++r) {
        auto it = targets.find(r);
        if (it == targets.end())
            throw malformed_instance("part " + std::to_string(r) + " has no target");
        inst.target[r - 1] = it->second;
    }
    validate(inst);
    return inst;
}

void validate(const pwsat_instance& inst)
{
    if (inst.part.size() != inst.num_vars)
        throw malformed_instance("part map does not cover the variables");
    std::vector<std::size_t> sizes(inst.num_parts(), 0);
    for (std::size_t v = 0; v < inst.num_vars; ++v) {
        if (inst.part[v] < 1 || inst.part[v] > inst.num_parts())
            throw malformed_instance("variable " + std::to_string(v + 1) + " has no valid part");
        ++sizes[inst.part[v] - 1];
    }
    for (std::size_t r = 0; r < inst.num_parts(); ++r)
        if (inst.target[r] > sizes[r])
            throw malformed_instance("target of part " + std::to_string(r + 1) + " exceeds its size");
    for (const auto& c : inst.clauses)
        for (int lit : c)
            if (lit == 0 || static_cast<std::size_t>(lit < 0 ? -lit : lit) > inst.num_vars)
                throw malformed_instance("clause uses an undeclared variable");
    if (inst.decomposition)
        for (const auto& bag : *inst.decomposition)
            for (std::size_t v : bag)
                if (v < 1 || v > inst.num_vars)
                    throw malformed_instance("decomposition uses an undeclared variable");
}

std::string format_pwsat(const pwsat_instance& inst)
{
    std::ostringstream out;
    out << "p cnf " << inst.num_vars << ' ' << inst.clauses.size() << '\n';
    for (const auto& c : inst.clauses) {
        for (int lit : c)
            out << lit << ' ';
        out << "0\n";
    }
    for (std::size_t v = 0; v < inst.num_vars; ++v)
        out << "part " << v + 1 << ' ' << inst.part[v] << '\n';
    for (std::size_t r = 0; r < inst.num_parts(); ++r)
        out << "tg " << r + 1 << ' ' << inst.target[r] << '\n';
    if (inst.decomposition)
        for (const auto& bag : *inst.decomposition) {
            out << "bag";
            for (std::size_t v : bag)
                out << ' ' << v;
            out << '\n';
        }
    return out.str();
}

flow_graph primal_graph(const pwsat_instance& inst)
{
    std::vector<std::string> names;
    for (std::size_t v = 1; v <= inst.num_vars; ++v)
        names.push_back(var_name(v));
    flow_graph g(std::move(names));
    for (const auto& c : inst.clauses)
        for (std::size_t i = 0; i < c.size(); ++i)
            for (std::size_t j = i + 1; j < c.size(); ++j) {
                const auto a = static_cast<std::size_t>(std::abs(c[i])) - 1;
                const auto b = static_cast<std::size_t>(std::abs(c[j])) - 1;
                if (a != b)
                    g.add_edge(a, b);
            }
    return g;
}

std::vector<std::vector<std::size_t>> optimal_path_decomposition(const flow_graph& g)
{
    const std::size_t n = g.size();
    if (n > 20)
        throw limit_exceeded("optimal path decomposition supports at most 20 vertices", n);
    if (n == 0)
        return {};
    std::vector<std::uint32_t> adj(n, 0);
    for (std::size_t v = 0; v < n; ++v)
        g.neighbours(v).for_each([&](std::size_t w) {
            if (w != v)
                adj[v] |= std::uint32_t{1} << w;
        });
    const std::uint32_t full = n == 32 ? ~0u : (std::uint32_t{1} << n) - 1;
    auto boundary = [&](std::uint32_t s) {
        std::uint32_t b = 0;
        for (std::uint32_t rest = s; rest; rest &= rest - 1) {
            const auto v = static_cast<std::size_t>(std::countr_zero(rest));
            if (adj[v] & ~s & full)
                b |= std::uint32_t{1} << v;
        }
        return b;
    };
    std::vector<std::uint8_t> best(std::size_t{1} << n, 0xff);
    std::vector<std::uint8_t> last(std::size_t{1} << n, 0);
    best[0] = 0;
    for (std::uint32_t s = 1; s <= full; ++s) {
        const auto cost = static_cast<std::uint8_t>(std::popcount(boundary(s)));
        for (std::uint32_t rest = s; rest; rest &= rest - 1) {
            const auto v = static_cast<std::size_t>(std::countr_zero(rest));
            const std::uint8_t c = std::max(best[s & ~(std::uint32_t{1} << v)], cost);
            if (c < best[s]) {
                best[s] = c;
                last[s] = static_cast<std::uint8_t>(v);
            }
        }
        if (s == full)
            break;
    }
    std::vector<std::size_t> layout;
    for (std::uint32_t s = full; s; s &= ~(std::uint32_t{1} << last[s]))
        layout.push_back(last[s]);
    std::reverse(layout.begin(), layout.end());
    std::vector<std::vector<std::size_t>> bags;
    std::uint32_t prefix = 0;
    for (std::size_t v : layout) {
        std::vector<std::size_t> bag{v};
        for (std::uint32_t b = boundary(prefix); b; b &= b - 1)
            bag.push_back(static_cast<std::size_t>(std::countr_zero(b)));
        std::sort(bag.begin(), bag.end());
        bags.push_back(std::move(bag));
        prefix |= std::uint32_t{1} << v;
    }
    return bags;
}

std::vector<std::vector<std::size_t>> primal_decomposition(const pwsat_instance& inst)
{
    const flow_graph g = primal_graph(inst);
    if (inst.decomposition) {
        path_decomposition d;
        for (const auto& bag : *inst.decomposition) {
            d.bags.emplace_back();
            for (std::size_t v : bag)
                d.bags.back().push_back(var_name(v));
        }
        const auto check = validate_path_decomposition(g, d);
        if (!check.valid())
            throw malformed_instance("primal decomposition is invalid: " + check.violation->describe());
        return *inst.decomposition;
    }
    if (inst.num_vars > 15)
        throw malformed_instance("no primal decomposition given and more than 15 variables");
    auto bags = optimal_path_decomposition(g);
    for (auto& bag : bags)
        for (auto& v : bag)
            ++v;
    return bags;
}

std::size_t decomposition_width(const std::vector<std::vector<std::size_t>>& bags)
{
    std::size_t w = 0;
    for (const auto& b : bags)
        w = std::max(w, b.empty() ? 0 : b.size() - 1);
    return w;
}

namespace {

std::vector<std::size_t> clause_vars(const std::vector<int>& clause)
{
    std::vector<std::size_t> vars;
    for (int lit : clause)
        vars.push_back(static_cast<std::size_t>(std::abs(lit)));
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    return vars;
}

bool holds_all(const std::vector<std::size_t>& bag, const std::vector<std::size_t>& vars)
{
    return std::all_of(vars.begin(), vars.end(),
                       [&](std::size_t v) { return std::find(bag.begin(), bag.end(), v) != bag.end(); });
}

std::size_t first_bag_with(const std::vector<std::vector<std::size_t>>& bags, const std::vector<std::size_t>& vars)
{
    for (std::size_t i = 0; i < bags.size(); ++i)
        if (holds_all(bags[i], vars))
            return i;
    if (vars.empty())
        return 0;
    throw malformed_instance("no decomposition bag holds all variables of a clause");
}

// Place names of the reduction net.
struct sat_names
{
    static std::string q(std::size_t i) { return "q" + std::to_string(i); }
    static std::string x(std::size_t i) { return "x" + std::to_string(i); }
    static std::string xb(std::size_t i) { return "xb" + std::to_string(i); }
    static std::string tup(std::size_t r) { return "tup" + std::to_string(r); }
    static std::string fup(std::size_t r) { return "fup" + std::to_string(r); }
    static std::string tu(std::size_t r, std::size_t j) { return "tu" + std::to_string(r) + "_" + std::to_string(j); }
    static std::string fl(std::size_t r, std::size_t j) { return "fl" + std::to_string(r) + "_" + std::to_string(j); }
    static std::string clause(std::size_t j) { return "C" + std::to_string(j); }
};

std::vector<std::size_t> part_sizes(const pwsat_instance& inst)
{
    std::vector<std::size_t> sizes(inst.num_parts(), 0);
    for (std::size_t p : inst.part)
        ++sizes[p - 1];
    return sizes;
}

} // namespace

std::vector<std::size_t> clause_order(const pwsat_instance& inst, const std::vector<std::vector<std::size_t>>& bags)
{
    std::vector<std::pair<std::size_t, std::size_t>> keyed;
    for (std::size_t c = 0; c < inst.clauses.size(); ++c)
        keyed.emplace_back(first_bag_with(bags, clause_vars(inst.clauses[c])), c);
    std::stable_sort(keyed.begin(), keyed.end());
    std::vector<std::size_t> order;
    for (auto [bag, c] : keyed)
        order.push_back(c);
    return order;
}

net_document sat_to_net(const pwsat_instance& inst)
{
    using N = sat_names;
    validate(inst);
    const auto order = clause_order(inst, primal_decomposition(inst));
    const auto sizes = part_sizes(inst);
    const std::size_t m = inst.clauses.size();
    net_builder b("ppwsat");
    for (std::size_t i = 1; i <= inst.num_vars; ++i) {
        b.place(N::q(i), true).place(N::x(i)).place(N::xb(i));
        const std::size_t r = inst.part[i - 1];
        b.transition("t" + std::to_string(i), {N::q(i), "s"}, {N::x(i), N::tup(r)});
        b.transition("f" + std::to_string(i), {N::q(i), "s"}, {N::xb(i), N::fup(r)});
        b.transition("td" + std::to_string(i), {N::x(i)}, {});
        b.transition("fd" + std::to_string(i), {N::xb(i)}, {});
    }
    std::vector<std::string> check_in{N::clause(m + 1)};
    for (std::size_t r = 1; r <= inst.num_parts(); ++r) {
        const std::size_t tg = inst.target[r - 1], fg = sizes[r - 1] - tg;
        b.place(N::tup(r)).place(N::fup(r));
        for (std::size_t j = 0; j <= tg; ++j)
            b.place(N::tu(r, j), j == 0);
        for (std::size_t j = 0; j <= fg; ++j)
            b.place(N::fl(r, j), j == 0);
        for (std::size_t j = 0; j < tg; ++j)
            b.transition("su" + std::to_string(r) + "_" + std::to_string(j), {N::tup(r), N::tu(r, j)},
                         {N::tu(r, j + 1), "s"});
        for (std::size_t j = 0; j < fg; ++j)
            b.transition("sf" + std::to_string(r) + "_" + std::to_string(j), {N::fup(r), N::fl(r, j)},
                         {N::fl(r, j + 1), "s"});
        check_in.push_back(N::tu(r, tg));
        check_in.push_back(N::fl(r, fg));
    }
    for (std::size_t j = 1; j <= m + 1; ++j)
        b.place(N::clause(j), j == 1);
    b.place("s", true).place("g");
    for (std::size_t j = 1; j <= m; ++j) {
        const auto& clause = inst.clauses[order[j - 1]];
        for (std::size_t l = 0; l < clause.size(); ++l) {
            const auto v = static_cast<std::size_t>(std::abs(clause[l]));
            const std::string lit = clause[l] > 0 ? N::x(v) : N::xb(v);
            b.transition("cl" + std::to_string(j) + "_" + std::to_string(l + 1), {N::clause(j), lit},
                         {N::clause(j + 1), lit});
        }
    }
    b.transition("check", check_in, {"g"});
    b.target({"s", "g"});
    return b.build();
}

path_decomposition build_reduction_decomposition(const pwsat_instance& inst)
{
    using N = sat_names;
    validate(inst);
    const auto primal = primal_decomposition(inst);
    const auto order = clause_order(inst, primal);
    const auto sizes = part_sizes(inst);
    const std::size_t m = inst.clauses.size();

    std::set<std::string> common{"s", "g", N::clause(m + 1)};
    for (std::size_t r = 1; r <= inst.num_parts(); ++r) {
        common.insert(N::tup(r));
        common.insert(N::fup(r));
        common.insert(N::tu(r, inst.target[r - 1]));
        common.insert(N::fl(r, sizes[r - 1] - inst.target[r - 1]));
    }
    struct bag
    {
        std::set<std::string> items;
        std::vector<std::size_t> vars;
        bool augmented = false;
    };
    std::vector<bag> bags;
    auto var_bag = [&](const std::vector<std::size_t>& vars) {
        bag b{common, vars, false};
        for (std::size_t v : vars) {
            b.items.insert(N::q(v));
            b.items.insert(N::x(v));
            b.items.insert(N::xb(v));
        }
        return b;
    };
    std::vector<bool> seen(inst.num_vars + 1, false);
    for (const auto& vars : primal) {
        bags.push_back(var_bag(vars));
        for (std::size_t v : vars)
            seen[v] = true;
    }
    for (std::size_t v = 1; v <= inst.num_vars; ++v)
        if (!seen[v])
            bags.push_back(var_bag({v}));
    if (bags.empty())
        bags.push_back(var_bag({}));

    // Augment the first plain bag holding each clause, in clause order.
    std::vector<std::size_t> position(m + 1, 0); // clause j -> index of its augmented bag
    for (std::size_t j = 1; j <= m; ++j) {
        const auto vars = clause_vars(inst.clauses[order[j - 1]]);
        std::size_t at = bags.size();
        for (std::size_t i = 0; i < bags.size(); ++i)
            if (!bags[i].augmented && holds_all(bags[i].vars, vars)) {
                at = i;
                break;
            }
        if (at == bags.size())
            throw malformed_instance("no decomposition bag holds all variables of a clause");
        bag copy = bags[at];
        copy.augmented = true;
        copy.items.insert(N::clause(j));
        bags.insert(bags.begin() + static_cast<std::ptrdiff_t>(at), std::move(copy));
        for (std::size_t k = 1; k < j; ++k)
            if (position[k] >= at)
                ++position[k];
        position[j] = at;
    }
    for (std::size_t j = 1; j < m; ++j)
        for (std::size_t i = position[j] + 1; i < position[j + 1]; ++i)
            if (!bags[i].augmented)
                bags[i].items.insert(N::clause(j));
    std::vector<std::set<std::string>> items;
    for (const auto& b : bags) {
        auto next = b.items;
        for (std::size_t j = 1; j <= m; ++j)
            if (b.items.count(N::clause(j)))
                next.insert(N::clause(j + 1));
        items.push_back(std::move(next));
    }
    for (std::size_t r = 1; r <= inst.num_parts(); ++r) {
        const std::size_t tg = inst.target[r - 1], fg = sizes[r - 1] - tg;
        for (std::size_t j = 0; j < tg; ++j) {
            auto b = common;
            b.insert(N::tu(r, j));
            b.insert(N::tu(r, j + 1));
            items.push_back(std::move(b));
        }
        for (std::size_t j = 0; j < fg; ++j) {
            auto b = common;
            b.insert(N::fl(r, j));
            b.insert(N::fl(r, j + 1));
            items.push_back(std::move(b));
        }
    }
    path_decomposition d;
    for (const auto& s : items)
        d.bags.emplace_back(s.begin(), s.end());
    return d;
}

bool brute_force_ppwsat(const pwsat_instance& inst)
{
    validate(inst);
    if (inst.num_vars > 20)
        throw limit_exceeded("brute force supports at most 20 variables", inst.num_vars);
    const auto sizes = part_sizes(inst);
    (void)sizes;
    for (std::uint32_t a = 0; a < (std::uint32_t{1} << inst.num_vars); ++a) {
        std::vector<std::size_t> trues(inst.num_parts(), 0);
        for (std::size_t v = 0; v < inst.num_vars; ++v)
            if (a >> v & 1)
                ++trues[inst.part[v] - 1];
        if (trues != inst.target)
            continue;
        const bool sat = std::all_of(inst.clauses.begin(), inst.clauses.end(), [&](const std::vector<int>& c) {
            return std::any_of(c.begin(), c.end(), [&](int lit) {
                const bool val = a >> (std::abs(lit) - 1) & 1;
                return lit > 0 ? val : !val;
            });
        });
        if (sat)
            return true;
    }
    return false;
}

std::size_t csp_instance::degree() const
{
    std::size_t best = 0;
    for (const auto& v : vars) {
        std::size_t d = 0;
        for (const auto& c : constraints)
            if (std::find(c.vars.begin(), c.vars.end(), v) != c.vars.end())
                ++d;
        best = std::max(best, d);
    }
    return best;
}

csp_instance parse_csp(std::string_view text)
{
    csp_instance inst;
    std::istringstream in{std::string(text)};
    bool have_dom = false;
    std::size_t lineno = 0;
    for (std::string raw; std::getline(in, raw);) {
        ++lineno;
        const std::string line = strip_comment(raw);
        const auto w = split_words(line);
        if (w.empty())
            continue;
        if (w[0] == "var") {
            for (std::size_t i = 1; i < w.size(); ++i) {
                if (!is_identifier(w[i]))
                    fail(lineno, "invalid variable identifier '" + w[i] + "'");
                if (std::find(inst.vars.begin(), inst.vars.end(), w[i]) != inst.vars.end())
                    fail(lineno, "duplicate variable '" + w[i] + "'");
                inst.vars.push_back(w[i]);
            }
        } else if (w[0] == "dom") {
            if (w.size() != 2)
                fail(lineno, "expected 'dom <size>'");
            if (have_dom)
                fail(lineno, "domain declared twice");
            inst.dom = to_count(w[1], lineno);
            have_dom = true;
        } else if (w[0] == "con") {
            const auto colon = line.find(':');
            if (colon == std::string::npos)
                fail(lineno, "expected 'con <vars> : <tuple>;<tuple>...'");
            csp_instance::constraint c;
            const auto head = split_words(line.substr(0, colon));
            for (std::size_t i = 1; i < head.size(); ++i) {
                if (std::find(inst.vars.begin(), inst.vars.end(), head[i]) == inst.vars.end())
                    fail(lineno, "undeclared variable '" + head[i] + "'");
                c.vars.push_back(head[i]);
            }
            if (c.vars.empty())
                fail(lineno, "constraint without variables");
            std::istringstream tuples(line.substr(colon + 1));
            for (std::string chunk; std::getline(tuples, chunk, ';');) {
                const auto vals = split_words(chunk);
                if (vals.empty())
                    continue;
                if (vals.size() != c.vars.size())
                    fail(lineno, "tuple arity differs from the constraint's variables");
                std::vector<std::size_t> t;
                for (const auto& v : vals)
                    t.push_back(to_count(v, lineno));
                c.tuples.push_back(std::move(t));
            }
            inst.constraints.push_back(std::move(c));
        } else {
            fail(lineno, "unknown directive '" + w[0] + "'");
        }
    }
    if (!have_dom)
        fail(lineno, "missing 'dom' line");
    validate(inst);
    return inst;
}

void validate(const csp_instance& inst)
{
    if (inst.dom < 1)
        throw malformed_instance("domain must be nonempty");
    for (const auto& v : inst.vars) {
        if (!is_identifier(v))
            throw malformed_instance("invalid variable identifier '" + v + "'");
        if (std::count(inst.vars.begin(), inst.vars.end(), v) != 1)
            throw malformed_instance("duplicate variable '" + v + "'");
        const bool used = std::any_of(inst.constraints.begin(), inst.constraints.end(), [&](const auto& c) {
            return std::find(c.vars.begin(), c.vars.end(), v) != c.vars.end();
        });
        if (!used)
            throw malformed_instance("variable '" + v + "' occurs in no constraint");
    }
    for (const auto& c : inst.constraints) {
        for (const auto& v : c.vars)
            if (std::find(inst.vars.begin(), inst.vars.end(), v) == inst.vars.end())
                throw malformed_instance("undeclared variable '" + v + "'");
        for (const auto& t : c.tuples) {
            if (t.size() != c.vars.size())
                throw malformed_instance("tuple arity differs from the constraint's variables");
            for (std::size_t d : t)
                if (d < 1 || d > inst.dom)
                    throw malformed_instance("tuple value " + std::to_string(d) + " outside the domain");
        }
    }
}

std::string format_csp(const csp_instance& inst)
{
    std::ostringstream out;
    out << "dom " << inst.dom << "\nvar";
    for (const auto& v : inst.vars)
        out << ' ' << v;
    out << '\n';
    for (const auto& c : inst.constraints) {
        out << "con";
        for (const auto& v : c.vars)
            out << ' ' << v;
        out << " :";
        for (std::size_t i = 0; i < c.tuples.size(); ++i) {
            out << (i ? ";" : "");
            for (std::size_t d : c.tuples[i])
                out << ' ' << d;
        }
        out << '\n';
    }
    return out.str();
}

net_document csp_to_net(const csp_instance& inst)
{
    validate(inst);
    auto slot = [](const std::string& v, std::size_t j, std::size_t d) {
        return "a_" + v + "_" + std::to_string(j) + "_" + std::to_string(d);
    };
    const std::size_t m = inst.constraints.size();
    net_builder b("csp");
    for (const auto& v : inst.vars) {
        b.place("q_" + v, true);
        for (std::size_t d = 1; d <= inst.dom; ++d) {
            std::vector<std::string> out;
            for (std::size_t j = 1; j <= m; ++j) {
                const auto& vs = inst.constraints[j - 1].vars;
                if (std::find(vs.begin(), vs.end(), v) == vs.end())
                    continue;
                const std::string p = slot(v, j, d);
                b.place(p);
                b.transition("rm_" + v + "_" + std::to_string(j) + "_" + std::to_string(d), {p}, {});
                out.push_back(p);
            }
            b.transition("set_" + v + "_" + std::to_string(d), {"q_" + v}, out);
        }
    }
    std::vector<std::string> all;
    for (std::size_t j = 1; j <= m; ++j) {
        const std::string cj = "C" + std::to_string(j);
        b.place(cj);
        all.push_back(cj);
        const auto& c = inst.constraints[j - 1];
        std::set<std::vector<std::size_t>> done;
        for (std::size_t k = 0; k < c.tuples.size(); ++k) {
            if (!done.insert(c.tuples[k]).second)
                continue;
            std::vector<std::string> in;
            for (std::size_t i = 0; i < c.vars.size(); ++i)
                in.push_back(slot(c.vars[i], j, c.tuples[k][i]));
            std::sort(in.begin(), in.end());
            in.erase(std::unique(in.begin(), in.end()), in.end());
            b.transition("sat" + std::to_string(j) + "_" + std::to_string(k + 1), in, {cj});
        }
    }
    b.place("g");
    b.transition("check", all, {"g"});
    b.target({"g"});
    return b.build();
}

bool brute_force_csp(const csp_instance& inst)
{
    validate(inst);
    const std::size_t n = inst.vars.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (total > 10'000'000 / inst.dom)
            throw limit_exceeded("brute force CSP enumeration too large", total);
        total *= inst.dom;
    }
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i)
        index[inst.vars[i]] = i;
    std::vector<std::size_t> value(n, 1);
    for (std::size_t step = 0; step < total; ++step) {
        const bool ok = std::all_of(inst.constraints.begin(), inst.constraints.end(), [&](const auto& c) {
            return std::any_of(c.tuples.begin(), c.tuples.end(), [&](const auto& t) {
                for (std::size_t i = 0; i < c.vars.size(); ++i)
                    if (value[index.at(c.vars[i])] != t[i])
                        return false;
                return true;
            });
        });
        if (ok)
            return true;
        for (std::size_t i = 0; i < n; ++i) {
            if (++value[i] <= inst.dom)
                break;
            value[i] = 1;
        }
    }
    return false;
}

pebbling_instance parse_pebbling(std::string_view text)
{
    pebbling_instance inst;
    struct arc
    {
        std::string from, to;
        bool positive;
        std::size_t line;
    };
    std::vector<arc> arcs;
    std::istringstream in{std::string(text)};
    std::size_t lineno = 0;
    std::set<std::string> names;
    for (std::string raw; std::getline(in, raw);) {
        ++lineno;
        const auto w = split_words(strip_comment(raw));
        if (w.empty())
            continue;
        if (w[0] == "red" || w[0] == "blue") {
            for (std::size_t i = 1; i < w.size(); ++i) {
                if (!is_identifier(w[i]))
                    fail(lineno, "invalid identifier '" + w[i] + "'");
                if (!names.insert(w[i]).second)
                    fail(lineno, "duplicate vertex '" + w[i] + "'");
                if (w[0] == "red")
                    inst.red.push_back(w[i]);
                else
                    inst.blue.push_back({w[i], {}, {}, {}, {}});
            }
        } else if (w[0] == "arc+" || w[0] == "arc-") {
            if (w.size() != 3)
                fail(lineno, "expected '" + w[0] + " <from> <to>'");
            arcs.push_back({w[1], w[2], w[0] == "arc+", lineno});
        } else {
            fail(lineno, "unknown directive '" + w[0] + "'");
        }
    }
    const std::size_t nr = inst.red.size();
    for (auto& b : inst.blue)
        b.requires_on = b.requires_off = b.pebbles = b.unpebbles = place_set(nr);
    auto red_index = [&](const std::string& id) -> std::optional<std::size_t> {
        auto it = std::find(inst.red.begin(), inst.red.end(), id);
        if (it == inst.red.end())
            return std::nullopt;
        return static_cast<std::size_t>(it - inst.red.begin());
    };
    auto blue_index = [&](const std::string& id) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < inst.blue.size(); ++i)
            if (inst.blue[i].name == id)
                return i;
        return std::nullopt;
    };
    for (const auto& a : arcs) {
        if (auto r = red_index(a.from)) {
            auto b = blue_index(a.to);
            if (!b)
                fail(a.line, "arc from red '" + a.from + "' must end at a blue vertex");
            auto& bv = inst.blue[*b];
            if ((a.positive ? bv.requires_off : bv.requires_on).test(*r))
                fail(a.line, "arc " + a.from + " -> " + a.to + " is both positive and negative");
            (a.positive ? bv.requires_on : bv.requires_off).set(*r);
        } else if (auto b = blue_index(a.from)) {
            auto r2 = red_index(a.to);
            if (!r2)
                fail(a.line, "arc from blue '" + a.from + "' must end at a red vertex");
            auto& bv = inst.blue[*b];
            if ((a.positive ? bv.unpebbles : bv.pebbles).test(*r2))
                fail(a.line, "arc " + a.from + " -> " + a.to + " is both positive and negative");
            (a.positive ? bv.pebbles : bv.unpebbles).set(*r2);
        } else {
            fail(a.line, "unknown vertex '" + a.from + "'");
        }
    }
    return inst;
}

std::string format_pebbling(const pebbling_instance& inst)
{
    std::ostringstream out;
    out << "red";
    for (const auto& r : inst.red)
        out << ' ' << r;
    out << "\nblue";
    for (const auto& b : inst.blue)
        out << ' ' << b.name;
    out << '\n';
    for (const auto& b : inst.blue) {
        b.requires_on.for_each([&](std::size_t r) { out << "arc+ " << inst.red[r] << ' ' << b.name << '\n'; });
        b.requires_off.for_each([&](std::size_t r) { out << "arc- " << inst.red[r] << ' ' << b.name << '\n'; });
        b.pebbles.for_each([&](std::size_t r) { out << "arc+ " << b.name << ' ' << inst.red[r] << '\n'; });
        b.unpebbles.for_each([&](std::size_t r) { out << "arc- " << b.name << ' ' << inst.red[r] << '\n'; });
    }
    return out.str();
}

pebbling_instance net_to_pebbling(const petri_net& net, const marking& m0, std::size_t goal)
{
    if (goal >= net.num_places())
        throw error("goal place out of range");
    pebbling_instance inst;
    inst.red = net.places();
    const std::size_t nr = inst.red.size();
    for (std::size_t t = 0; t < net.num_transitions(); ++t) {
        pebbling_instance::blue_vertex b{net.transition_name(t), net.pre(t), place_set(nr), net.post(t), net.pre(t)};
        b.pebbles -= net.pre(t);
        b.unpebbles -= net.post(t);
        inst.blue.push_back(std::move(b));
    }
    auto fresh = [&](std::string base) {
        while (net.transition_index(base))
            base += "_";
        return base;
    };
    place_set all(nr);
    for (std::size_t r = 0; r < nr; ++r)
        all.set(r);
    place_set goal_set(nr);
    goal_set.set(goal);
    inst.blue.push_back({fresh("b1"), place_set(nr), all, m0, place_set(nr)});
    inst.blue.push_back({fresh("b2"), goal_set, place_set(nr), all, place_set(nr)});
    return inst;
}

std::optional<std::vector<std::size_t>> pebbling_reachable(const pebbling_instance& inst, std::size_t limit)
{
    const std::size_t nr = inst.red.size();
    place_set start(nr), finish(nr);
    for (std::size_t r = 0; r < nr; ++r)
        finish.set(r);
    struct info
    {
        std::optional<place_set> parent;
        std::size_t move;
    };
    std::unordered_map<place_set, info, place_set_hash> seen;
    std::deque<place_set> work{start};
    seen.emplace(start, info{std::nullopt, 0});
    while (!work.empty()) {
        place_set s = std::move(work.front());
        work.pop_front();
        if (s == finish) {
            std::vector<std::size_t> moves;
            for (const place_set* at = &s; seen.at(*at).parent; at = &*seen.at(*at).parent)
                moves.push_back(seen.at(*at).move);
            std::reverse(moves.begin(), moves.end());
            return moves;
        }
        for (std::size_t b = 0; b < inst.blue.size(); ++b) {
            const auto& bv = inst.blue[b];
            if (!bv.requires_on.is_subset_of(s) || bv.requires_off.intersects(s))
                continue;
            place_set next = s;
            next -= bv.unpebbles;
            next |= bv.pebbles;
            if (seen.count(next))
                continue;
            if (seen.size() >= limit)
                throw limit_exceeded("pebbling state limit reached", seen.size());
            seen.emplace(next, info{s, b});
            work.push_back(std::move(next));
        }
    }
    return std::nullopt;
}

net_document formula_gadget_net(const std::vector<std::string>& vars)
{
    net_builder b("gadget");
    for (const auto& v : vars) {
        if (v == "g1" || v == "g2")
            throw malformed_instance("variable name '" + v + "' is reserved");
        b.place(v, true);
        b.transition("off_" + v, {v, "g1"}, {"g2"});
    }
    b.place("g1", true).place("g2");
    b.transition("tick", {"g1"}, {"g2"});
    b.transition("tock", {"g2"}, {"g1"});
    return b.build();
}

formula gadget_property(const formula& f)
{
    return make_not(make_binary(ltl_op::until, make_true(), f));
}

bool brute_force_sat(const formula& f)
{
    const auto props = atoms(f);
    if (props.size() > 20)
        throw limit_exceeded("brute force supports at most 20 variables", props.size());
    for (letter l = 0; l < (letter{1} << props.size()); ++l)
        if (eval_ltl(f, props, std::vector<letter>{l}))
            return true;
    return false;
}

net_document manufacturing_system(std::size_t a, std::size_t b, std::size_t c)
{
    net_builder nb("msys_" + std::to_string(a) + "_" + std::to_string(b) + "_" + std::to_string(c));
    nb.place("p1", true).place("p2").place("p3").place("p4");
    const std::pair<const char*, std::size_t> materials[] = {{"alpha", a}, {"beta", b}, {"gamma", c}};
    const char* stages[] = {"p1", "p2", "p3", "p4"};
    for (std::size_t m = 0; m < 3; ++m)
        for (std::size_t i = 1; i <= materials[m].second; ++i) {
            const std::string unit = materials[m].first + std::to_string(i);
            nb.place(unit, true);
            nb.transition("take_" + unit, {stages[m], unit}, {stages[m + 1]});
        }
    nb.transition("t1", {"p4"}, {"p1"});
    return nb.build();
}

} // namespace vcnet
