#pragma once

#include <string>

namespace quintel::app {

/// Aligned-text rendering of the four worked combination tables (spread rows,
/// both rules, intermediate odds rows). Every cell is computed by the fusion
/// module; the output is pinned by a golden file.
std::string render_demo_tables();

}  // namespace quintel::app
