#include "vcnet/net.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace vcnet {

namespace {

std::optional<std::size_t> sorted_index(const std::vector<std::string>& ids, std::string_view id)
{
    auto it = std::lower_bound(ids.begin(), ids.end(), id,
                               [](const std::string& a, std::string_view b) { return a < b; });
    if (it == ids.end() || *it != id)
        return std::nullopt;
    return static_cast<std::size_t>(it - ids.begin());
}

std::vector<std::string> split_ws(std::string_view line)
{
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
            ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r')
            ++j;
        if (j > i)
            out.emplace_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

} // namespace

std::optional<std::size_t> petri_net::place_index(std::string_view id) const
{
    return sorted_index(places_, id);
}

std::optional<std::size_t> petri_net::transition_index(std::string_view id) const
{
    return sorted_index(transitions_, id);
}

marking petri_net::make_marking(const std::vector<std::string>& ids) const
{
    marking m(places_.size());
    for (const auto& id : ids) {
        auto p = place_index(id);
        if (!p)
            throw malformed_instance("unknown place '" + id + "'");
        m.set(*p);
    }
    return m;
}

net_builder& net_builder::place(const std::string& id, bool marked)
{
    places_.emplace_back(id, marked);
    return *this;
}

net_builder& net_builder::transition(const std::string& id, const std::vector<std::string>& pre,
                                     const std::vector<std::string>& post)
{
    transitions_.push_back({id, pre, post});
    return *this;
}

net_builder& net_builder::target(const std::vector<std::string>& ids)
{
    target_ = ids;
    return *this;
}

net_builder::result net_builder::build() const
{
    result r;
    petri_net& net = r.net;
    net.name_ = name_;
    for (const auto& [id, marked] : places_) {
        if (!is_identifier(id))
            throw malformed_instance("invalid place identifier '" + id + "'");
        net.places_.push_back(id);
    }
    for (const auto& t : transitions_) {
        if (!is_identifier(t.id))
            throw malformed_instance("invalid transition identifier '" + t.id + "'");
        net.transitions_.push_back(t.id);
    }
    std::sort(net.places_.begin(), net.places_.end());
    std::sort(net.transitions_.begin(), net.transitions_.end());
    if (auto d = std::adjacent_find(net.places_.begin(), net.places_.end()); d != net.places_.end())
        throw malformed_instance("duplicate place '" + *d + "'");
    if (auto d = std::adjacent_find(net.transitions_.begin(), net.transitions_.end());
        d != net.transitions_.end())
        throw malformed_instance("duplicate transition '" + *d + "'");

    const std::size_t np = net.places_.size();
    net.pre_.assign(net.transitions_.size(), place_set(np));
    net.post_.assign(net.transitions_.size(), place_set(np));
    net.consumers_.assign(np, {});
    for (const auto& t : transitions_) {
        const std::size_t ti = *net.transition_index(t.id);
        for (const auto& p : t.pre) {
            auto pi = net.place_index(p);
            if (!pi)
                throw malformed_instance("transition '" + t.id + "' references undeclared place '" + p + "'");
            net.pre_[ti].set(*pi);
        }
        for (const auto& p : t.post) {
            auto pi = net.place_index(p);
            if (!pi)
                throw malformed_instance("transition '" + t.id + "' references undeclared place '" + p + "'");
            net.post_[ti].set(*pi);
        }
    }
    for (std::size_t t = 0; t < net.transitions_.size(); ++t)
        net.pre_[t].for_each([&](std::size_t p) { net.consumers_[p].push_back(t); });

    r.initial = marking(np);
    for (const auto& [id, marked] : places_)
        if (marked)
            r.initial.set(*net.place_index(id));
    if (target_)
        r.target = net.make_marking(*target_);
    return r;
}

bool is_identifier(std::string_view id)
{
    if (id.empty())
        return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
               c == '.' || c == '^' || c == '-';
    });
}

net_document parse_net(std::string_view text)
{
    std::string name = "net";
    std::vector<std::pair<std::string, bool>> places;
    std::map<std::string, std::size_t> place_line;
    struct trans_decl
    {
        std::string id;
        std::vector<std::string> pre, post;
        std::size_t line;
    };
    std::vector<trans_decl> trans;
    std::map<std::string, std::size_t> trans_line;
    std::optional<std::pair<std::vector<std::string>, std::size_t>> target;

    // Statements end at a newline or ';'; '#' comments run to the newline.
    std::size_t line_no = 0;
    bool line_start = true;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        if (line_start)
            ++line_no;
        std::size_t eol = text.find_first_of("\n;#", pos);
        if (eol != std::string_view::npos && text[eol] == '#')
            eol = text.find('\n', eol);
        if (eol == std::string_view::npos)
            eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        line_start = eol >= text.size() || text[eol] == '\n';
        pos = eol + 1;
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        auto tok = split_ws(line);
        if (tok.empty())
            continue;
        auto fail = [&](const std::string& msg) -> void {
            throw parse_error(line_no, "line " + std::to_string(line_no) + ": " + msg);
        };
        auto check_id = [&](const std::string& id) {
            if (!is_identifier(id))
                fail("invalid identifier '" + id + "'");
        };
        const std::string& kw = tok[0];
        if (kw == "net") {
            if (tok.size() != 2)
                fail("expected 'net <name>'");
            name = tok[1];
        } else if (kw == "place") {
            if (tok.size() < 2 || tok.size() > 3 || (tok.size() == 3 && tok[2] != "marked"))
                fail("expected 'place <id> [marked]'");
            check_id(tok[1]);
            if (place_line.count(tok[1]))
                fail("duplicate place '" + tok[1] + "' (first declared on line " +
                     std::to_string(place_line[tok[1]]) + ")");
            place_line[tok[1]] = line_no;
            places.emplace_back(tok[1], tok.size() == 3);
        } else if (kw == "trans") {
            if (tok.size() < 2)
                fail("expected 'trans <id> pre <id>* post <id>*'");
            check_id(tok[1]);
            if (trans_line.count(tok[1]))
                fail("duplicate transition '" + tok[1] + "' (first declared on line " +
                     std::to_string(trans_line[tok[1]]) + ")");
            trans_line[tok[1]] = line_no;
            trans_decl d{tok[1], {}, {}, line_no};
            std::vector<std::string>* into = nullptr;
            bool seen_pre = false, seen_post = false;
            for (std::size_t i = 2; i < tok.size(); ++i) {
                if (tok[i] == "pre") {
                    if (seen_pre || seen_post)
                        fail("misplaced 'pre'");
                    seen_pre = true;
                    into = &d.pre;
                } else if (tok[i] == "post") {
                    if (seen_post)
                        fail("duplicate 'post'");
                    seen_post = true;
                    into = &d.post;
                } else {
                    if (!into)
                        fail("expected 'pre' or 'post' before '" + tok[i] + "'");
                    check_id(tok[i]);
                    into->push_back(tok[i]);
                }
            }
            trans.push_back(std::move(d));
        } else if (kw == "target") {
            if (target)
                fail("duplicate 'target'");
            std::vector<std::string> ids(tok.begin() + 1, tok.end());
            for (const auto& id : ids)
                check_id(id);
            target = std::make_pair(ids, line_no);
        } else {
            fail("unknown directive '" + kw + "'");
        }
    }

    for (const auto& t : trans)
        for (const auto* side : {&t.pre, &t.post})
            for (const auto& p : *side)
                if (!place_line.count(p))
                    throw parse_error(t.line, "line " + std::to_string(t.line) + ": transition '" + t.id +
                                                  "' references undeclared place '" + p + "'");
    if (target)
        for (const auto& p : target->first)
            if (!place_line.count(p))
                throw parse_error(target->second, "line " + std::to_string(target->second) +
                                                      ": target references undeclared place '" + p + "'");

    net_builder b(name);
    for (const auto& [id, marked] : places)
        b.place(id, marked);
    for (const auto& t : trans)
        b.transition(t.id, t.pre, t.post);
    if (target)
        b.target(target->first);
    return b.build();
}

net_document read_net_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw error("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_net(ss.str());
}

std::string format_net(const petri_net& net, const marking& initial, const std::optional<marking>& target)
{
    std::ostringstream out;
    out << "net " << net.name() << '\n';
    for (std::size_t p = 0; p < net.num_places(); ++p) {
        out << "place " << net.place_name(p);
        if (initial.test(p))
            out << " marked";
        out << '\n';
    }
    for (std::size_t t = 0; t < net.num_transitions(); ++t) {
        out << "trans " << net.transition_name(t) << " pre";
        net.pre(t).for_each([&](std::size_t p) { out << ' ' << net.place_name(p); });
        out << " post";
        net.post(t).for_each([&](std::size_t p) { out << ' ' << net.place_name(p); });
        out << '\n';
    }
    if (target) {
        out << "target";
        target->for_each([&](std::size_t p) { out << ' ' << net.place_name(p); });
        out << '\n';
    }
    return out.str();
}

bool is_enabled(const petri_net& net, const marking& m, std::size_t t)
{
    return net.pre(t).is_subset_of(m);
}

std::vector<std::size_t> enabled(const petri_net& net, const marking& m)
{
    std::vector<std::size_t> out;
    for (std::size_t t = 0; t < net.num_transitions(); ++t)
        if (is_enabled(net, m, t))
            out.push_back(t);
    return out;
}

marking fire(const petri_net& net, const marking& m, std::size_t t)
{
    if (!is_enabled(net, m, t))
        throw not_enabled_error("transition '" + net.transition_name(t) + "' is not enabled");
    marking next = m - net.pre(t);
    const place_set overflow = next & net.post(t);
    if (overflow.any())
        throw one_safety_violation(net.transition_name(t), net.place_name(overflow.indices().front()));
    next |= net.post(t);
    return next;
}

std::string format_marking(const petri_net& net, const marking& m)
{
    std::string out = "{";
    bool first = true;
    m.for_each([&](std::size_t p) {
        if (!first)
            out += ',';
        out += net.place_name(p);
        first = false;
    });
    return out + "}";
}

} // namespace vcnet
