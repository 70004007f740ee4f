#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ksom/som.hpp"
#include "ksom/superclass.hpp"

namespace ksom::cli {

/// One classified observation as listed in an assignment file.
struct MapEntry {
    std::string label;
    std::size_t unit = 0;
    bool supplementary = false;
};

/// Reads the classify output (row,label,unit,...,supplementary). Rows without a
/// unit are skipped; empty labels fall back to the 1-based row number.
std::vector<MapEntry> read_assignments(std::istream& in, const GridTopology& topo);

struct RenderOptions {
    /// Text grid only; the SVG always lists every member.
    std::size_t max_labels = 4;
    std::string title;
    /// Embedded in the SVG metadata block.
    std::string config_json;
};

/// Grid map with one cell per unit, row-major, members listed inside each cell.
std::string render_svg(const GridTopology& topo, const std::vector<MapEntry>& entries,
                       const std::optional<SuperClassing>& superclasses, const RenderOptions& options);

std::string render_text(const GridTopology& topo, const std::vector<MapEntry>& entries,
                        const std::optional<SuperClassing>& superclasses, const RenderOptions& options);

}  // namespace ksom::cli
