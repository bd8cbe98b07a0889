#include <expat.h>

#include <algorithm>
#include <cmath>

#include "chartfix/error.hpp"
#include "chartfix/path.hpp"
#include "chartfix/svg.hpp"

namespace chartfix::svg {

namespace {

ElementKind kind_of(std::string_view tag) {
    if (tag == "text") return ElementKind::Text;
    if (tag == "rect") return ElementKind::Rect;
    if (tag == "circle") return ElementKind::Circle;
    if (tag == "ellipse") return ElementKind::Ellipse;
    if (tag == "line") return ElementKind::Line;
    if (tag == "path" || tag == "polyline" || tag == "polygon") return ElementKind::Path;
    if (tag == "g" || tag == "svg" || tag == "a" || tag == "switch") return ElementKind::Group;
    return ElementKind::Other;
}

std::string_view local_name(std::string_view qname) {
    const auto colon = qname.rfind(':');
    return colon == std::string_view::npos ? qname : qname.substr(colon + 1);
}

struct ParseState {
    Document doc;
    std::vector<ElementId> stack;
    int skip_depth = 0;          // >0 while inside an unsupported subtree
    int tspan_depth = 0;         // nested <tspan> inside the current <text>
    bool saw_root = false;
    std::string error;
};

void on_start(void* user, const XML_Char* name, const XML_Char** atts) {
    auto& st = *static_cast<ParseState*>(user);
    const std::string_view tag = local_name(name);
    if (st.skip_depth > 0) {
        ++st.skip_depth;
        return;
    }
    if (!st.saw_root) {
        st.saw_root = true;
        if (tag != "svg") {
            st.error = "root element is <" + std::string(tag) + ">, expected <svg>";
            return;
        }
    }
    if (tag == "foreignObject") {
        st.doc.diagnostics.push_back({std::string(to_string(ErrorCode::UnsupportedFeature)) +
                                      ": <foreignObject> subtree skipped"});
        st.skip_depth = 1;
        return;
    }
    std::vector<Attribute> attributes;
    for (int i = 0; atts[i]; i += 2) attributes.emplace_back(atts[i], atts[i + 1]);

    if (!st.stack.empty()) {
        Element& top = st.doc.elements[st.stack.back()];
        if (top.kind == ElementKind::Text && (tag == "tspan" || st.tspan_depth > 0)) {
            // Nested tspans are flattened into one run per start tag.
            ++st.tspan_depth;
            top.runs.push_back({std::move(attributes), {}});
            return;
        }
    }
    Element e;
    e.id = st.doc.elements.size();
    e.kind = kind_of(tag);
    e.tag = std::string(tag);
    e.attributes = std::move(attributes);
    if (!st.stack.empty()) {
        e.parent = st.stack.back();
        st.doc.elements[st.stack.back()].children.push_back(e.id);
    }
    st.stack.push_back(e.id);
    st.doc.elements.push_back(std::move(e));
}

void on_end(void* user, const XML_Char*) {
    auto& st = *static_cast<ParseState*>(user);
    if (st.skip_depth > 0) {
        --st.skip_depth;
        return;
    }
    if (st.tspan_depth > 0) {
        --st.tspan_depth;
        // Text after a closing tspan belongs to an anonymous run.
        st.doc.elements[st.stack.back()].runs.push_back({{}, {}});
        return;
    }
    if (!st.stack.empty()) st.stack.pop_back();
}

void on_text(void* user, const XML_Char* s, int len) {
    auto& st = *static_cast<ParseState*>(user);
    if (st.skip_depth > 0 || st.stack.empty()) return;
    Element& top = st.doc.elements[st.stack.back()];
    if (top.kind == ElementKind::Text && !top.runs.empty()) top.runs.back().text.append(s, static_cast<std::size_t>(len));
    else top.text.append(s, static_cast<std::size_t>(len));
}

void escape_into(std::string& out, std::string_view s, bool attribute) {
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"':
                if (attribute) out += "&quot;";
                else out.push_back(c);
                break;
            default: out.push_back(c);
        }
    }
}

void write_attributes(std::string& out, const std::vector<Attribute>& attributes) {
    for (const auto& [k, v] : attributes) {
        out.push_back(' ');
        out += k;
        out += "=\"";
        escape_into(out, v, true);
        out.push_back('"');
    }
}

bool blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

void write_element(const Document& doc, ElementId id, std::string& out, int depth) {
    const Element& e = doc.at(id);
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
    out.push_back('<');
    out += e.tag;
    write_attributes(out, e.attributes);
    if (id == 0 && !e.attribute("xmlns")) out += " xmlns=\"http://www.w3.org/2000/svg\"";

    std::vector<TextRun> runs;
    for (const auto& r : e.runs)
        if (!r.attributes.empty() || !r.text.empty()) runs.push_back(r);
    const bool has_text = !blank(e.text) || (e.kind == ElementKind::Text && !e.text.empty());
    if (e.children.empty() && runs.empty() && !has_text) {
        out += "/>\n";
        return;
    }
    out.push_back('>');
    if (has_text) escape_into(out, e.text, false);
    for (const auto& r : runs) {
        if (r.attributes.empty()) {
            escape_into(out, r.text, false);
            continue;
        }
        out += "<tspan";
        write_attributes(out, r.attributes);
        out.push_back('>');
        escape_into(out, r.text, false);
        out += "</tspan>";
    }
    if (!e.children.empty()) {
        out.push_back('\n');
        for (ElementId c : e.children) write_element(doc, c, out, depth + 1);
        out.append(static_cast<std::size_t>(depth) * 2, ' ');
    }
    out += "</";
    out += e.tag;
    out += ">\n";
}

double number_attribute(const Element& e, std::string_view name, double fallback, bool& missing, bool required) {
    const auto* v = e.attribute(name);
    if (!v) {
        if (required) missing = true;
        return fallback;
    }
    auto n = parse_length(*v, e.font_size());
    if (!n) {
        missing = true;
        return fallback;
    }
    return *n;
}

}  // namespace

Document parse_svg(std::string_view bytes) {
    ParseState st;
    XML_Parser parser = XML_ParserCreate(nullptr);
    if (!parser) throw Error(ErrorCode::MalformedDocument, "cannot create XML parser");
    XML_SetUserData(parser, &st);
    XML_SetElementHandler(parser, on_start, on_end);
    XML_SetCharacterDataHandler(parser, on_text);
    const auto status = XML_Parse(parser, bytes.data(), static_cast<int>(bytes.size()), XML_TRUE);
    std::string message;
    if (status != XML_STATUS_OK) {
        message = std::string(XML_ErrorString(XML_GetErrorCode(parser))) + " at line " +
                  std::to_string(XML_GetCurrentLineNumber(parser));
    }
    XML_ParserFree(parser);
    if (!message.empty()) throw Error(ErrorCode::MalformedDocument, message);
    if (!st.error.empty()) throw Error(ErrorCode::MalformedDocument, st.error);
    if (st.doc.elements.empty()) throw Error(ErrorCode::MalformedDocument, "no <svg> root");
    st.doc.resolve();
    return std::move(st.doc);
}

std::string serialize(const Document& doc) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    if (doc.elements.empty()) return out + "<svg xmlns=\"http://www.w3.org/2000/svg\"/>\n";
    write_element(doc, 0, out, 0);
    return out;
}

Rect2D compute_bbox(const Document& doc, ElementId id, const TextMetricsConfig& metrics) {
    const Element& e = doc.at(id);
    bool missing = false;
    Rect2D local;
    switch (e.kind) {
        case ElementKind::Rect: {
            const double x = number_attribute(e, "x", 0, missing, false);
            const double y = number_attribute(e, "y", 0, missing, false);
            const double w = number_attribute(e, "width", 0, missing, true);
            const double h = number_attribute(e, "height", 0, missing, true);
            if (missing || w < 0 || h < 0) return {};
            local = Rect2D::from_xywh(x, y, w, h);
            break;
        }
        case ElementKind::Circle: {
            const double cx = number_attribute(e, "cx", 0, missing, false);
            const double cy = number_attribute(e, "cy", 0, missing, false);
            const double r = number_attribute(e, "r", 0, missing, true);
            if (missing || r < 0) return {};
            local = {cx - r, cy - r, cx + r, cy + r};
            break;
        }
        case ElementKind::Ellipse: {
            const double cx = number_attribute(e, "cx", 0, missing, false);
            const double cy = number_attribute(e, "cy", 0, missing, false);
            const double rx = number_attribute(e, "rx", 0, missing, true);
            const double ry = number_attribute(e, "ry", 0, missing, true);
            if (missing || rx < 0 || ry < 0) return {};
            local = {cx - rx, cy - ry, cx + rx, cy + ry};
            break;
        }
        case ElementKind::Line: {
            const double x1 = number_attribute(e, "x1", 0, missing, false);
            const double y1 = number_attribute(e, "y1", 0, missing, false);
            const double x2 = number_attribute(e, "x2", 0, missing, false);
            const double y2 = number_attribute(e, "y2", 0, missing, false);
            if (missing) return {};
            Rect2D out;
            out.include(e.transform.apply({x1, y1}));
            out.include(e.transform.apply({x2, y2}));
            return out;
        }
        case ElementKind::Path: {
            std::vector<Vec2> pts;
            if (e.tag == "path") {
                const auto* d = e.attribute("d");
                if (!d) return {};
                auto cmds = parse_path(*d);
                if (!cmds) return {};
                pts = path_control_points(*cmds);
            } else {
                const auto* p = e.attribute("points");
                if (!p) return {};
                pts = parse_points(*p);
            }
            Rect2D out;
            for (const auto& p : pts) out.include(e.transform.apply(p));
            return out;
        }
        case ElementKind::Text: {
            if (e.lines.empty()) return {};
            local = text_local_box(text_layout_input(e), e.font_size(), e.lines, metrics);
            break;
        }
        case ElementKind::Group: {
            Rect2D out;
            for (ElementId c : e.children) {
                const Element& child = doc.at(c);
                if (!child.visible) continue;
                out = out.united(compute_bbox(doc, c, metrics));
            }
            return out;
        }
        case ElementKind::Other: {
            const double x = number_attribute(e, "x", 0, missing, false);
            const double y = number_attribute(e, "y", 0, missing, false);
            const double w = number_attribute(e, "width", 0, missing, true);
            const double h = number_attribute(e, "height", 0, missing, true);
            if (missing) return {};
            local = Rect2D::from_xywh(x, y, w, h);
            break;
        }
    }
    return e.transform.map_rect(local);
}

}  // namespace chartfix::svg
