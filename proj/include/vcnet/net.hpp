#pragma once

#include "vcnet/errors.hpp"
#include "vcnet/place_set.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vcnet {

// A 1-safe Petri net: places, transitions and 0/1 pre/post incidences.
// Places and transitions are kept sorted by identifier so that every
// iteration over them is deterministic.
class petri_net
{
public:
    petri_net() = default;

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] std::size_t num_places() const { return places_.size(); }
    [[nodiscard]] std::size_t num_transitions() const { return transitions_.size(); }
    [[nodiscard]] const std::vector<std::string>& places() const { return places_; }
    [[nodiscard]] const std::vector<std::string>& transitions() const { return transitions_; }
    [[nodiscard]] const std::string& place_name(std::size_t p) const { return places_[p]; }
    [[nodiscard]] const std::string& transition_name(std::size_t t) const { return transitions_[t]; }

    [[nodiscard]] std::optional<std::size_t> place_index(std::string_view id) const;
    [[nodiscard]] std::optional<std::size_t> transition_index(std::string_view id) const;

    // Preset / postset of transition t as place sets.
    [[nodiscard]] const place_set& pre(std::size_t t) const { return pre_[t]; }
    [[nodiscard]] const place_set& post(std::size_t t) const { return post_[t]; }
    [[nodiscard]] bool pre(std::size_t p, std::size_t t) const { return pre_[t].test(p); }
    [[nodiscard]] bool post(std::size_t p, std::size_t t) const { return post_[t].test(p); }

    // Transitions having p in their preset ("output transitions" of p).
    [[nodiscard]] const std::vector<std::size_t>& consumers(std::size_t p) const { return consumers_[p]; }

    [[nodiscard]] marking empty_marking() const { return marking(places_.size()); }
    [[nodiscard]] marking make_marking(const std::vector<std::string>& ids) const;

    friend bool operator==(const petri_net&, const petri_net&) = default;

private:
    friend class net_builder;

    std::string name_;
    std::vector<std::string> places_;
    std::vector<std::string> transitions_;
    std::vector<place_set> pre_;
    std::vector<place_set> post_;
    std::vector<std::vector<std::size_t>> consumers_;
};

// Accumulates places and transitions by name; build() sorts identifiers and
// validates references.
class net_builder
{
public:
    explicit net_builder(std::string name = "net") : name_{std::move(name)} {}

    net_builder& place(const std::string& id, bool marked = false);
    net_builder& transition(const std::string& id, const std::vector<std::string>& pre,
                            const std::vector<std::string>& post);
    net_builder& target(const std::vector<std::string>& ids);

    struct result
    {
        petri_net net;
        marking initial;
        std::optional<marking> target;
    };
    [[nodiscard]] result build() const;

private:
    struct pending_transition
    {
        std::string id;
        std::vector<std::string> pre;
        std::vector<std::string> post;
    };
    std::string name_;
    std::vector<std::pair<std::string, bool>> places_;
    std::vector<pending_transition> transitions_;
    std::optional<std::vector<std::string>> target_;
};

// Parsed net document: the net, its initial marking and optional target.
using net_document = net_builder::result;

[[nodiscard]] bool is_identifier(std::string_view id);

[[nodiscard]] net_document parse_net(std::string_view text);
[[nodiscard]] net_document read_net_file(const std::string& path);
[[nodiscard]] std::string format_net(const petri_net& net, const marking& initial,
                                     const std::optional<marking>& target = std::nullopt);

[[nodiscard]] std::vector<std::size_t> enabled(const petri_net& net, const marking& m);
[[nodiscard]] bool is_enabled(const petri_net& net, const marking& m, std::size_t t);

// Fires t at m. Throws not_enabled_error or one_safety_violation.
[[nodiscard]] marking fire(const petri_net& net, const marking& m, std::size_t t);

[[nodiscard]] std::string format_marking(const petri_net& net, const marking& m);

} // namespace vcnet
