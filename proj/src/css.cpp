#include "chartfix/css.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>
#include <tuple>

namespace chartfix::css {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string strip_comments(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '/' && i + 1 < text.size() && text[i + 1] == '*') {
            const auto end = text.find("*/", i + 2);
            if (end == std::string_view::npos) break;
            i = end + 1;
            continue;
        }
        out.push_back(text[i]);
    }
    return out;
}

bool has_class(std::string_view class_attr, std::string_view cls) {
    std::size_t i = 0;
    while (i < class_attr.size()) {
        while (i < class_attr.size() && std::isspace(static_cast<unsigned char>(class_attr[i]))) ++i;
        std::size_t j = i;
        while (j < class_attr.size() && !std::isspace(static_cast<unsigned char>(class_attr[j]))) ++j;
        if (j > i && class_attr.substr(i, j - i) == cls) return true;
        i = j;
    }
    return false;
}

bool matches_compound(const CompoundSelector& c, const NodeInfo& n) {
    if (!c.tag.empty() && c.tag != "*" && c.tag != n.tag) return false;
    if (!c.id.empty() && c.id != n.id) return false;
    for (const auto& cls : c.classes)
        if (!has_class(n.class_attr, cls)) return false;
    return true;
}

// Right-to-left matching with backtracking over descendant combinators.
bool matches_from(const Selector& sel, int ci, std::span<const NodeInfo> chain, std::size_t ni) {
    if (ni >= chain.size() || !matches_compound(sel.compounds[ci], chain[ni])) return false;
    if (ci == 0) return true;
    const char comb = sel.combinators[ci - 1];
    if (comb == '>') return matches_from(sel, ci - 1, chain, ni + 1);
    for (std::size_t k = ni + 1; k < chain.size(); ++k)
        if (matches_from(sel, ci - 1, chain, k)) return true;
    return false;
}

std::optional<Selector> parse_selector(std::string_view text) {
    Selector sel;
    std::size_t i = 0;
    char pending = 0;
    auto is_name = [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '*';
    };
    while (i < text.size()) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!sel.compounds.empty() && pending == 0) pending = ' ';
            ++i;
            continue;
        }
        if (c == '>') {
            pending = '>';
            ++i;
            continue;
        }
        if (c == '+' || c == '~' || c == '[' || c == ':') return std::nullopt;
        CompoundSelector comp;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '>') {
            char kind = 0;
            if (text[i] == '.' || text[i] == '#') kind = text[i++];
            std::size_t j = i;
            while (j < text.size() && is_name(text[j])) ++j;
            if (j == i) return std::nullopt;
            const std::string name(text.substr(i, j - i));
            if (kind == '.') comp.classes.push_back(name);
            else if (kind == '#') comp.id = name;
            else comp.tag = lower(name);
            i = j;
        }
        if (!sel.compounds.empty()) sel.combinators.push_back(pending ? pending : ' ');
        pending = 0;
        sel.compounds.push_back(std::move(comp));
    }
    if (sel.compounds.empty()) return std::nullopt;
    int a = 0, b = 0, c = 0;
    for (const auto& comp : sel.compounds) {
        a += comp.id.empty() ? 0 : 1;
        b += static_cast<int>(comp.classes.size());
        c += (comp.tag.empty() || comp.tag == "*") ? 0 : 1;
    }
    sel.specificity = a * 10000 + b * 100 + c;
    return sel;
}

constexpr std::array kPresentation = {
    "fill",        "stroke",       "stroke-width",      "stroke-dasharray", "font-size",
    "font-family", "font-weight",  "font-style",        "text-anchor",      "dominant-baseline",
    "display",     "visibility",   "opacity",           "fill-opacity",     "stroke-opacity",
    "alignment-baseline"};

constexpr std::array kNotInherited = {"display", "opacity"};

}  // namespace

StyleMap parse_declarations(std::string_view text) {
    StyleMap out;
    const std::string clean = strip_comments(text);
    std::string_view rest = clean;
    while (!rest.empty()) {
        const auto semi = rest.find(';');
        std::string_view decl = rest.substr(0, semi);
        rest = semi == std::string_view::npos ? std::string_view{} : rest.substr(semi + 1);
        const auto colon = decl.find(':');
        if (colon == std::string_view::npos) continue;
        auto name = trim(decl.substr(0, colon));
        auto value = trim(decl.substr(colon + 1));
        if (const auto bang = value.find("!important"); bang != std::string_view::npos)
            value = trim(value.substr(0, bang));
        if (!name.empty() && !value.empty()) out[lower(name)] = std::string(value);
    }
    return out;
}

std::string format_declarations(const StyleMap& style) {
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, v] : style) {
        if (!first) os << ' ';
        os << k << ':' << v << ';';
        first = false;
    }
    return os.str();
}

bool is_presentation_property(std::string_view name) {
    return std::find(kPresentation.begin(), kPresentation.end(), name) != kPresentation.end();
}

bool is_inherited(std::string_view name) {
    return std::find(kNotInherited.begin(), kNotInherited.end(), name) == kNotInherited.end();
}

void Stylesheet::parse(std::string_view raw, std::vector<std::string>& warnings) {
    const std::string text = strip_comments(raw);
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i >= text.size()) break;
        if (text[i] == '@') {
            const auto semi = text.find(';', i);
            const auto brace = text.find('{', i);
            const std::string_view at = std::string_view(text).substr(i, 7);
            if (at.starts_with("@import")) {
                warnings.push_back("UnsupportedFeature: external stylesheet import ignored");
                i = semi == std::string::npos ? text.size() : semi + 1;
                continue;
            }
            if (brace != std::string::npos && (semi == std::string::npos || brace < semi)) {
                int depth = 0;
                std::size_t j = brace;
                for (; j < text.size(); ++j) {
                    if (text[j] == '{') ++depth;
                    else if (text[j] == '}' && --depth == 0) break;
                }
                i = j + 1;
            } else {
                i = semi == std::string::npos ? text.size() : semi + 1;
            }
            continue;
        }
        const auto open = text.find('{', i);
        if (open == std::string::npos) break;
        const auto close = text.find('}', open);
        if (close == std::string::npos) break;
        const std::string_view selectors = std::string_view(text).substr(i, open - i);
        const StyleMap decls = parse_declarations(std::string_view(text).substr(open + 1, close - open - 1));
        std::size_t s = 0;
        while (s <= selectors.size()) {
            const auto comma = selectors.find(',', s);
            const auto part = trim(selectors.substr(s, comma == std::string_view::npos ? std::string_view::npos : comma - s));
            if (!part.empty()) {
                if (auto sel = parse_selector(part)) {
                    rules_.push_back({std::move(*sel), decls, rules_.size()});
                }
            }
            if (comma == std::string_view::npos) break;
            s = comma + 1;
        }
        i = close + 1;
    }
}

StyleMap Stylesheet::match(std::span<const NodeInfo> chain) const {
    std::vector<const Rule*> hits;
    for (const auto& rule : rules_) {
        const int last = static_cast<int>(rule.selector.compounds.size()) - 1;
        if (matches_from(rule.selector, last, chain, 0)) hits.push_back(&rule);
    }
    std::stable_sort(hits.begin(), hits.end(), [](const Rule* a, const Rule* b) {
        return std::tie(a->selector.specificity, a->order) < std::tie(b->selector.specificity, b->order);
    });
    StyleMap out;
    for (const Rule* r : hits)
        for (const auto& [k, v] : r->declarations) out[k] = v;
    return out;
}

}  // namespace chartfix::css
