#pragma once

// Time-ordered integrals of E[prod_k Q(X(s_k))] for a zero-mean Gaussian
// process with scalar covariance f(s,t) delta_ij, via labeled multigraphs
// with exact symmetry factors, plus the pairing/Monte-Carlo validators.

#include "wickgraph/errors.hpp"
#include "wickgraph/rational.hpp"
#include "wickgraph/polynomial.hpp"
#include "wickgraph/multigraph.hpp"
#include "wickgraph/factors.hpp"
#include "wickgraph/kernel.hpp"
#include "wickgraph/quadrature.hpp"
#include "wickgraph/oracle.hpp"
#include "wickgraph/engine.hpp"
#include "wickgraph/monte_carlo.hpp"
#include "wickgraph/json_io.hpp"
