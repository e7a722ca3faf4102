#pragma once

#include "bohrrec/rational.hpp"
#include "bohrrec/hamming_cells.hpp"
#include "bohrrec/torus_boxes.hpp"
#include "bohrrec/bohr_analysis.hpp"
#include "bohrrec/nonrecurrence.hpp"
#include "bohrrec/tower_builder.hpp"
#include "bohrrec/pipeline.hpp"
#include "bohrrec/serialize.hpp"
#include "bohrrec/svg.hpp"
