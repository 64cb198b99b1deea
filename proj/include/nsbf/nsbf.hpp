#ifndef NSBF_NSBF_HPP
#define NSBF_NSBF_HPP

#include "nsbf/coefficients.hpp"
#include "nsbf/decay.hpp"
#include "nsbf/error.hpp"
#include "nsbf/evaluator.hpp"
#include "nsbf/grid.hpp"
#include "nsbf/kernel.hpp"
#include "nsbf/oracle.hpp"
#include "nsbf/particular_solution.hpp"
#include "nsbf/pipeline.hpp"
#include "nsbf/problem.hpp"
#include "nsbf/special_functions.hpp"
#include "nsbf/spectrum.hpp"

#endif  // NSBF_NSBF_HPP
