#include "render.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <sstream>

#include "ksom/dataset.hpp"
#include "ksom/error.hpp"

namespace ksom::cli {

namespace {

constexpr std::size_t kCellWidth = 170;
constexpr std::size_t kLineHeight = 14;
constexpr std::size_t kCellHeader = 22;
constexpr std::size_t kTextCellWidth = 18;

constexpr std::array<const char*, 10> kShades = {"#dbe9f6", "#fde2c8", "#d9f0d3", "#f6d5e5", "#e8e0f3",
                                                 "#fff3bf", "#d4eeee", "#f3dcd4", "#e6e6e6", "#e3f0c8"};

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(ch);
        }
    }
    return out;
}

std::vector<std::vector<const MapEntry*>> members_by_unit(const GridTopology& topo,
                                                          const std::vector<MapEntry>& entries) {
    std::vector<std::vector<const MapEntry*>> cells(topo.units());
    for (const auto& e : entries) {
        if (e.unit >= topo.units()) throw MismatchError("assignment refers to unit " + std::to_string(e.unit));
        cells[e.unit].push_back(&e);
    }
    return cells;
}

std::string coord(const GridTopology& topo, std::size_t unit) {
    return "(" + std::to_string(topo.row_of(unit) + 1) + "," + std::to_string(topo.col_of(unit) + 1) + ")";
}

}  // namespace

std::vector<MapEntry> read_assignments(std::istream& in, const GridTopology& topo) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("assignment file is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_csv_record(line);
    auto column = [&](const std::string& name) -> std::optional<std::size_t> {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) return std::nullopt;
        return static_cast<std::size_t>(it - header.begin());
    };
    const auto unit_col = column("unit");
    if (!unit_col) throw DataError("assignment file has no 'unit' column");
    const auto label_col = column("label");
    const auto row_col = column("row");
    const auto supp_col = column("supplementary");

    std::vector<MapEntry> out;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++n;
        const auto f = split_csv_record(line);
        if (f.size() != header.size()) throw DataError("assignment line " + std::to_string(n + 1) + " is ragged");
        const std::string& unit_text = f[*unit_col];
        if (unit_text.empty() || unit_text == "NA") continue;
        MapEntry e;
        try {
            e.unit = std::stoul(unit_text);
        } catch (const std::exception&) {
            throw DataError("assignment line " + std::to_string(n + 1) + ": bad unit '" + unit_text + "'");
        }
        if (e.unit >= topo.units()) {
            throw MismatchError("assignment refers to unit " + unit_text + " on a " + std::to_string(topo.rows()) +
                                "x" + std::to_string(topo.cols()) + " map");
        }
        e.label = label_col ? f[*label_col] : std::string();
        if (e.label.empty()) e.label = row_col ? f[*row_col] : std::to_string(n);
        e.supplementary = supp_col && f[*supp_col] == "1";
        out.push_back(std::move(e));
    }
    return out;
}

std::string render_svg(const GridTopology& topo, const std::vector<MapEntry>& entries,
                       const std::optional<SuperClassing>& superclasses, const RenderOptions& options) {
    if (superclasses && superclasses->assignment.size() != topo.units()) {
        throw MismatchError("super-classing does not cover the map");
    }
    const auto cells = members_by_unit(topo, entries);
    std::size_t lines = 1;
    for (const auto& c : cells) lines = std::max(lines, c.size());
    const std::size_t cell_h = kCellHeader + lines * kLineHeight;
    const std::size_t top = options.title.empty() ? 0 : 28;
    const std::size_t width = topo.cols() * kCellWidth;
    const std::size_t height = top + topo.rows() * cell_h;

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    if (!options.config_json.empty()) {
        svg << "<metadata id=\"run-config\"><![CDATA[" << options.config_json << "]]></metadata>\n";
    }
    svg << "<style>\n"
        << ".unit{stroke:#444;stroke-width:1}\n"
        << ".coord{font:bold 10px sans-serif;fill:#666}\n"
        << ".member{font:11px sans-serif;fill:#111}\n"
        << ".supp{font-style:italic;text-decoration:underline}\n"
        << ".title{font:bold 14px sans-serif}\n"
        << "</style>\n";
    if (!options.title.empty()) {
        svg << "<text class=\"title\" x=\"6\" y=\"18\">" << xml_escape(options.title) << "</text>\n";
    }
    for (std::size_t u = 0; u < topo.units(); ++u) {
        const std::size_t x = topo.col_of(u) * kCellWidth;
        const std::size_t y = top + topo.row_of(u) * cell_h;
        std::string cls = "unit";
        std::string fill = "#ffffff";
        if (superclasses) {
            const std::size_t sc = superclasses->assignment[u];
            cls += " sc" + std::to_string(sc);
            fill = kShades[sc % kShades.size()];
        }
        svg << "<g class=\"cell\" data-unit=\"" << u << "\">\n"
            << "<rect class=\"" << cls << "\" x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCellWidth
            << "\" height=\"" << cell_h << "\" fill=\"" << fill << "\"/>\n"
            << "<text class=\"coord\" x=\"" << x + 4 << "\" y=\"" << y + 12 << "\">" << coord(topo, u) << "</text>\n";
        std::size_t line = 0;
        for (const MapEntry* e : cells[u]) {
            svg << "<text class=\"member" << (e->supplementary ? " supp" : "") << "\" x=\"" << x + 6 << "\" y=\""
                << y + kCellHeader + line * kLineHeight + 8 << "\">" << xml_escape(e->label) << "</text>\n";
            ++line;
        }
        svg << "</g>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string render_text(const GridTopology& topo, const std::vector<MapEntry>& entries,
                        const std::optional<SuperClassing>& superclasses, const RenderOptions& options) {
    const auto cells = members_by_unit(topo, entries);
    auto fit = [](std::string s) {
        if (s.size() > kTextCellWidth) s = s.substr(0, kTextCellWidth - 1) + "~";
        return s + std::string(kTextCellWidth - s.size(), ' ');
    };
    std::vector<std::vector<std::string>> blocks(topo.units());
    for (std::size_t u = 0; u < topo.units(); ++u) {
        std::string head = coord(topo, u);
        if (superclasses) head += " S" + std::to_string(superclasses->assignment[u] + 1);
        blocks[u].push_back(head);
        const auto& members = cells[u];
        const std::size_t shown = std::min(members.size(), options.max_labels);
        for (std::size_t i = 0; i < shown; ++i) {
            blocks[u].push_back((members[i]->supplementary ? "*" : "") + members[i]->label);
        }
        if (members.size() > shown) blocks[u].push_back("+" + std::to_string(members.size() - shown) + " more");
    }

    std::ostringstream out;
    if (!options.title.empty()) out << options.title << '\n';
    const std::string rule(topo.cols() * (kTextCellWidth + 3) + 1, '-');
    out << rule << '\n';
    for (std::size_t r = 0; r < topo.rows(); ++r) {
        std::size_t height = 0;
        for (std::size_t c = 0; c < topo.cols(); ++c) height = std::max(height, blocks[topo.index(r, c)].size());
        for (std::size_t line = 0; line < height; ++line) {
            out << '|';
            for (std::size_t c = 0; c < topo.cols(); ++c) {
                const auto& b = blocks[topo.index(r, c)];
                out << ' ' << fit(line < b.size() ? b[line] : std::string()) << " |";
            }
            out << '\n';
        }
        out << rule << '\n';
    }
    if (std::any_of(entries.begin(), entries.end(), [](const MapEntry& e) { return e.supplementary; })) {
        out << "* supplementary observation\n";
    }
    return out.str();
}

}  // namespace ksom::cli
