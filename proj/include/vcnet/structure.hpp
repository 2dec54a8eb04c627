#pragma once

#include "vcnet/net.hpp"
#include "vcnet/reach.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vcnet {

// Undirected graph on vertices 0..n-1 with optional self-loops. Vertex names
// are carried along so that covers and decompositions can be printed.
class flow_graph
{
public:
    flow_graph() = default;
    explicit flow_graph(std::vector<std::string> names);

    void add_edge(std::size_t a, std::size_t b);

    [[nodiscard]] std::size_t size() const { return names_.size(); }
    [[nodiscard]] const std::vector<std::string>& names() const { return names_; }
    [[nodiscard]] const place_set& neighbours(std::size_t v) const { return adj_[v]; }
    [[nodiscard]] bool has_edge(std::size_t a, std::size_t b) const { return adj_[a].test(b); }
    [[nodiscard]] bool has_self_loop(std::size_t v) const { return adj_[v].test(v); }
    [[nodiscard]] std::size_t num_edges() const;
    // Edges (a, b) with a <= b, in lexicographic order.
    [[nodiscard]] std::vector<std::pair<std::size_t, std::size_t>> edges() const;
    [[nodiscard]] std::optional<std::size_t> index_of(const std::string& name) const;

    friend bool operator==(const flow_graph&, const flow_graph&) = default;

private:
    std::vector<std::string> names_;
    std::vector<place_set> adj_;
};

[[nodiscard]] flow_graph make_flow_graph(const petri_net& net);

[[nodiscard]] bool is_vertex_cover(const flow_graph& g, const place_set& cover);

// Minimum vertex cover if one of size <= budget exists.
[[nodiscard]] std::optional<place_set> min_vertex_cover(const flow_graph& g, std::size_t budget);
[[nodiscard]] place_set min_vertex_cover(const flow_graph& g);

// Reads `cover <id>*` / bare identifier lists; throws parse_error.
[[nodiscard]] place_set parse_cover(const petri_net& net, std::string_view text);

struct neighbourhood
{
    place_set inputs;
    place_set outputs;
    friend bool operator==(const neighbourhood&, const neighbourhood&) = default;
};

struct neighbourhood_table
{
    std::vector<neighbourhood> classes;
    std::vector<std::size_t> class_of; // per transition
};

// Effect of a non-cover place per neighbourhood class: bit 0 set when some
// transition of the class removes a token (-1), bit 1 when some adds one (+1).
struct interface_value
{
    std::vector<std::uint8_t> effect;

    static constexpr std::uint8_t minus = 1;
    static constexpr std::uint8_t plus = 2;

    [[nodiscard]] bool empty() const;
    friend bool operator==(const interface_value&, const interface_value&) = default;
    friend auto operator<=>(const interface_value&, const interface_value&) = default;
};

struct interface_map
{
    neighbourhood_table table;
    std::vector<interface_value> distinct;           // Int, sorted
    std::vector<std::optional<std::size_t>> of_place; // index into distinct; none for cover places
    // Places of each interface, ascending.
    [[nodiscard]] std::vector<std::vector<std::size_t>> members() const;
};

// Throws invalid_cover when `cover` does not cover the flow graph.
[[nodiscard]] neighbourhood_table neighbourhoods(const petri_net& net, const place_set& cover);
[[nodiscard]] interface_map interfaces(const petri_net& net, const place_set& cover);

// |ben(p)| for one place and the maximum over all places.
[[nodiscard]] place_set benefited(const petri_net& net, std::size_t p);
[[nodiscard]] std::size_t benefit_depth(const petri_net& net);

struct path_decomposition
{
    std::vector<std::vector<std::string>> bags;
    friend bool operator==(const path_decomposition&, const path_decomposition&) = default;
};

[[nodiscard]] path_decomposition parse_decomposition(std::string_view text);
[[nodiscard]] std::string format_decomposition(const path_decomposition& d);

struct decomposition_violation
{
    enum class kind { unknown_vertex, missing_vertex, not_contiguous, edge_uncovered };
    kind what;
    std::string vertex;
    std::string other; // second endpoint for edge_uncovered
    [[nodiscard]] std::string describe() const;
};

struct decomposition_check
{
    std::optional<std::size_t> width;
    std::optional<decomposition_violation> violation;
    [[nodiscard]] bool valid() const { return width.has_value(); }
};

[[nodiscard]] decomposition_check validate_path_decomposition(const flow_graph& g, const path_decomposition& d);

// Runtime form of the same-interface exclusion property: in every explored
// marking, a marked non-cover place disables all transitions that add a
// token to any place sharing its interface. Returns a description of the
// first offending marking, if any.
[[nodiscard]] std::optional<std::string> check_interface_exclusion(const petri_net& net, const reach_graph& g,
                                                                   const interface_map& im);

} // namespace vcnet
