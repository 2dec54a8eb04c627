#include "vcnet/structure.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

namespace vcnet {

flow_graph::flow_graph(std::vector<std::string> names) : names_{std::move(names)}
{
    adj_.assign(names_.size(), place_set(names_.size()));
}

void flow_graph::add_edge(std::size_t a, std::size_t b)
{
    adj_[a].set(b);
    adj_[b].set(a);
}

std::size_t flow_graph::num_edges() const
{
    return edges().size();
}

std::vector<std::pair<std::size_t, std::size_t>> flow_graph::edges() const
{
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t a = 0; a < size(); ++a)
        adj_[a].for_each([&](std::size_t b) {
            if (a <= b)
                out.emplace_back(a, b);
        });
    return out;
}

std::optional<std::size_t> flow_graph::index_of(const std::string& name) const
{
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name)
            return i;
    return std::nullopt;
}

flow_graph make_flow_graph(const petri_net& net)
{
    flow_graph g(net.places());
    for (std::size_t t = 0; t < net.num_transitions(); ++t) {
        const auto touched = (net.pre(t) | net.post(t)).indices();
        for (std::size_t i = 0; i < touched.size(); ++i)
            for (std::size_t j = i + 1; j < touched.size(); ++j)
                g.add_edge(touched[i], touched[j]);
        (net.pre(t) & net.post(t)).for_each([&](std::size_t p) { g.add_edge(p, p); });
    }
    return g;
}

bool is_vertex_cover(const flow_graph& g, const place_set& cover)
{
    if (cover.width() != g.size())
        return false;
    for (auto [a, b] : g.edges())
        if (!cover.test(a) && !cover.test(b))
            return false;
    return true;
}

namespace {

class cover_search
{
public:
    explicit cover_search(const flow_graph& g) : g_{g} {}

    // Cover of the subgraph induced by `alive` using at most k vertices.
    std::optional<place_set> solve(const place_set& alive, std::size_t k) const
    {
        const std::size_t n = g_.size();
        std::size_t best = n, best_deg = 0, edges2 = 0;
        std::optional<std::size_t> leaf;
        for (std::size_t v = 0; v < n; ++v) {
            if (!alive.test(v))
                continue;
            const std::size_t d = (g_.neighbours(v) & alive).count();
            edges2 += d;
            if (d > best_deg) {
                best_deg = d;
                best = v;
            }
            if (d == 1 && !leaf)
                leaf = v;
        }
        if (best_deg == 0)
            return place_set(n);
        if (k == 0 || edges2 / 2 > k * best_deg)
            return std::nullopt;

        auto take = [&](const place_set& chosen, std::size_t cost) -> std::optional<place_set> {
            if (cost > k)
                return std::nullopt;
            auto rest = solve(alive - chosen, k - cost);
            if (rest)
                *rest |= chosen;
            return rest;
        };
        if (leaf) {
            // The neighbour of a degree-1 vertex is always a safe choice.
            return take(g_.neighbours(*leaf) & alive, 1);
        }
        place_set self(n);
        self.set(best);
        if (best_deg > k)
            return take(self, 1);
        if (auto r = take(self, 1))
            return r;
        const place_set nb = g_.neighbours(best) & alive;
        return take(nb, nb.count());
    }

private:
    const flow_graph& g_;
};

} // namespace

std::optional<place_set> min_vertex_cover(const flow_graph& g, std::size_t budget)
{
    const std::size_t n = g.size();
    place_set forced(n);
    for (std::size_t v = 0; v < n; ++v)
        if (g.has_self_loop(v))
            forced.set(v);
    if (forced.count() > budget)
        return std::nullopt;
    place_set alive(n);
    for (std::size_t v = 0; v < n; ++v)
        if (!forced.test(v))
            alive.set(v);
    cover_search search(g);
    for (std::size_t k = 0; k + forced.count() <= budget; ++k) {
        if (auto c = search.solve(alive, k))
            return *c | forced;
    }
    return std::nullopt;
}

place_set min_vertex_cover(const flow_graph& g)
{
    return *min_vertex_cover(g, g.size());
}

place_set parse_cover(const petri_net& net, std::string_view text)
{
    place_set cover(net.num_places());
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
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream in(line);
        std::string id;
        bool first = true;
        while (in >> id) {
            if (first && id == "cover") {
                first = false;
                continue;
            }
            first = false;
            auto p = net.place_index(id);
            if (!p)
                throw parse_error(line_no, "line " + std::to_string(line_no) + ": unknown place '" + id + "'");
            cover.set(*p);
        }
    }
    return cover;
}

bool interface_value::empty() const
{
    return std::all_of(effect.begin(), effect.end(), [](std::uint8_t e) { return e == 0; });
}

neighbourhood_table neighbourhoods(const petri_net& net, const place_set& cover)
{
    if (!is_vertex_cover(make_flow_graph(net), cover))
        throw invalid_cover("the given place set is not a vertex cover of the flow graph");
    neighbourhood_table table;
    for (std::size_t t = 0; t < net.num_transitions(); ++t) {
        neighbourhood nb{net.pre(t) & cover, net.post(t) & cover};
        auto it = std::find(table.classes.begin(), table.classes.end(), nb);
        if (it == table.classes.end()) {
            table.class_of.push_back(table.classes.size());
            table.classes.push_back(std::move(nb));
        } else {
            table.class_of.push_back(static_cast<std::size_t>(it - table.classes.begin()));
        }
    }
    return table;
}

interface_map interfaces(const petri_net& net, const place_set& cover)
{
    interface_map im;
    im.table = neighbourhoods(net, cover);
    const std::size_t l = im.table.classes.size();
    std::vector<std::optional<interface_value>> per_place(net.num_places());
    for (std::size_t p = 0; p < net.num_places(); ++p) {
        if (cover.test(p))
            continue;
        interface_value v{std::vector<std::uint8_t>(l, 0)};
        for (std::size_t t = 0; t < net.num_transitions(); ++t) {
            const bool in = net.pre(p, t), out = net.post(p, t);
            if (in && !out)
                v.effect[im.table.class_of[t]] |= interface_value::minus;
            else if (out && !in)
                v.effect[im.table.class_of[t]] |= interface_value::plus;
        }
        per_place[p] = std::move(v);
    }
    for (const auto& v : per_place)
        if (v)
            im.distinct.push_back(*v);
    std::sort(im.distinct.begin(), im.distinct.end());
    im.distinct.erase(std::unique(im.distinct.begin(), im.distinct.end()), im.distinct.end());
    im.of_place.assign(net.num_places(), std::nullopt);
    for (std::size_t p = 0; p < net.num_places(); ++p)
        if (per_place[p])
            im.of_place[p] = static_cast<std::size_t>(
                std::lower_bound(im.distinct.begin(), im.distinct.end(), *per_place[p]) - im.distinct.begin());
    return im;
}

std::vector<std::vector<std::size_t>> interface_map::members() const
{
    std::vector<std::vector<std::size_t>> out(distinct.size());
    for (std::size_t p = 0; p < of_place.size(); ++p)
        if (of_place[p])
            out[*of_place[p]].push_back(p);
    return out;
}

place_set benefited(const petri_net& net, std::size_t p)
{
    place_set ben(net.num_places());
    ben.set(p);
    std::deque<std::size_t> work{p};
    while (!work.empty()) {
        const std::size_t q = work.front();
        work.pop_front();
        for (std::size_t t : net.consumers(q))
            net.post(t).for_each([&](std::size_t r) {
                if (!ben.test(r)) {
                    ben.set(r);
                    work.push_back(r);
                }
            });
    }
    return ben;
}

std::size_t benefit_depth(const petri_net& net)
{
    std::size_t depth = 0;
    for (std::size_t p = 0; p < net.num_places(); ++p)
        depth = std::max(depth, benefited(net, p).count());
    return depth;
}

path_decomposition parse_decomposition(std::string_view text)
{
    path_decomposition d;
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
        std::istringstream in(line);
        std::string kw;
        if (!(in >> kw))
            continue;
        if (kw != "bag")
            throw parse_error(line_no, "line " + std::to_string(line_no) + ": expected 'bag <id>*'");
        std::vector<std::string> bag;
        for (std::string id; in >> id;) {
            if (!is_identifier(id))
                throw parse_error(line_no, "line " + std::to_string(line_no) + ": invalid identifier '" + id + "'");
            bag.push_back(id);
        }
        d.bags.push_back(std::move(bag));
    }
    return d;
}

std::string format_decomposition(const path_decomposition& d)
{
    std::string out;
    for (const auto& bag : d.bags) {
        out += "bag";
        for (const auto& v : bag)
            out += ' ' + v;
        out += '\n';
    }
    return out;
}

std::string decomposition_violation::describe() const
{
    switch (what) {
    case kind::unknown_vertex:
        return "unknown vertex '" + vertex + "'";
    case kind::missing_vertex:
        return "vertex '" + vertex + "' occurs in no bag";
    case kind::not_contiguous:
        return "bags containing '" + vertex + "' are not contiguous";
    case kind::edge_uncovered:
        return "edge (" + vertex + ", " + other + ") is in no bag";
    }
    return {};
}

decomposition_check validate_path_decomposition(const flow_graph& g, const path_decomposition& d)
{
    using kind = decomposition_violation::kind;
    std::map<std::string, std::size_t> index;
    for (std::size_t v = 0; v < g.size(); ++v)
        index.emplace(g.names()[v], v);

    std::vector<place_set> bags;
    std::size_t max_bag = 0;
    for (const auto& bag : d.bags) {
        place_set s(g.size());
        for (const auto& name : bag) {
            auto it = index.find(name);
            if (it == index.end())
                return {std::nullopt, decomposition_violation{kind::unknown_vertex, name, {}}};
            s.set(it->second);
        }
        max_bag = std::max(max_bag, s.count());
        bags.push_back(std::move(s));
    }
    for (std::size_t v = 0; v < g.size(); ++v) {
        std::optional<std::size_t> first, last;
        std::size_t seen = 0;
        for (std::size_t b = 0; b < bags.size(); ++b)
            if (bags[b].test(v)) {
                if (!first)
                    first = b;
                last = b;
                ++seen;
            }
        if (!first)
            return {std::nullopt, decomposition_violation{kind::missing_vertex, g.names()[v], {}}};
        if (*last - *first + 1 != seen)
            return {std::nullopt, decomposition_violation{kind::not_contiguous, g.names()[v], {}}};
    }
    for (auto [a, b] : g.edges()) {
        const bool covered =
            std::any_of(bags.begin(), bags.end(), [&](const place_set& s) { return s.test(a) && s.test(b); });
        if (!covered)
            return {std::nullopt, decomposition_violation{kind::edge_uncovered, g.names()[a], g.names()[b]}};
    }
    return {max_bag == 0 ? 0 : max_bag - 1, std::nullopt};
}

std::optional<std::string> check_interface_exclusion(const petri_net& net, const reach_graph& g,
                                                     const interface_map& im)
{
    const auto members = im.members();
    const auto offsets = g.out_offsets();
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const marking& m = g.nodes[i];
        for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) {
            const std::size_t t = g.edges[e].transition;
            for (std::size_t p : m.indices()) {
                if (!im.of_place[p])
                    continue;
                for (std::size_t q : members[*im.of_place[p]])
                    if (net.post(q, t) && !net.pre(q, t))
                        return "marking " + format_marking(net, m) + " marks '" + net.place_name(p) +
                               "' yet enables '" + net.transition_name(t) + "' which adds to '" +
                               net.place_name(q) + "'";
            }
        }
    }
    return std::nullopt;
}

} // namespace vcnet
