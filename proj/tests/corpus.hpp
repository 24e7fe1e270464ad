#pragma once

#include <string>
#include <vector>

#include "feyn/amplitude.hpp"
#include "feyn/graph.hpp"

namespace corpus {

// All connected multigraphs (loops excluded) with 2..4 vertices and 1..6 edges,
// oriented low -> high, one representative per edge multiset.
std::vector<feyn::DecoratedGraph> exhaustive(int dim = 1);

// Connected random multigraphs with <= 6 vertices and <= 9 edges, fixed seed.
std::vector<feyn::DecoratedGraph> random_graphs(int count = 200, int dim = 1, unsigned seed = 20240601);

std::vector<feyn::DecoratedGraph> full(int dim = 1);

std::string data_path(const std::string& rel);

// Gaussian test form with fixed, non-degenerate momenta for n relative vertices.
feyn::TestForm generic_form(int dim, int num_relative, double width = 0.8);

feyn::DecoratedGraph single_edge(int dim = 1);
feyn::DecoratedGraph bigon(int dim = 1);
feyn::DecoratedGraph triangle(int dim = 1);

}  // namespace corpus
