#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chartfix::css {

using StyleMap = std::map<std::string, std::string, std::less<>>;

/// Parse "prop: value; prop2: value2" (inline style bodies and rule blocks).
StyleMap parse_declarations(std::string_view text);
std::string format_declarations(const StyleMap& style);

/// Presentation properties this engine resolves. Anything else is ignored.
bool is_presentation_property(std::string_view name);
bool is_inherited(std::string_view name);

struct CompoundSelector {
    std::string tag;  // empty or "*" matches any element
    std::string id;
    std::vector<std::string> classes;
};

struct Selector {
    std::vector<CompoundSelector> compounds;  // left to right
    std::vector<char> combinators;            // ' ' or '>', size compounds-1
    int specificity = 0;
};

struct Rule {
    Selector selector;
    StyleMap declarations;
    std::size_t order = 0;
};

/// What the selector matcher needs to know about one element.
struct NodeInfo {
    std::string_view tag;
    std::string_view id;
    std::string_view class_attr;
};

class Stylesheet {
public:
    /// Append the rules in `text`. @import and @media are not supported:
    /// the former is reported through `warnings`, the latter skipped.
    void parse(std::string_view text, std::vector<std::string>& warnings);

    /// Declarations that apply to chain[0], whose ancestors follow in order.
    StyleMap match(std::span<const NodeInfo> chain) const;

    bool empty() const { return rules_.empty(); }
    const std::vector<Rule>& rules() const { return rules_; }

private:
    std::vector<Rule> rules_;
};

}  // namespace chartfix::css
