#pragma once

#include "adfit/histfactory.hpp"
#include "adfit/ir.hpp"
#include "adfit/numdiff.hpp"
#include "adfit/objective.hpp"

namespace adfit {

/// A model lowered to executable programs: the optimized objective program
/// and its optimized reverse-mode gradient program. Build times are kept so
/// benchmarks can report transform cost separately from evaluation cost.
struct CompiledModel {
    ParamLayout layout;
    Program objective; // squash + fold/CSE/DCE
    Program gradient;  // reverse_grad of the objective, same passes
    double squash_seconds = 0.0;
    double grad_transform_seconds = 0.0;
};

CompiledModel compile_model(const HistFactorySpec& spec, const Dataset& data);

/// Interprets the program's single output. Numerical-domain errors surface
/// as NaN so a line search can reject the point and continue. Each wrapper
/// owns its scratch buffers; distinct wrappers are safe to use concurrently.
Objective make_objective(Program program);

/// Gradient from a reverse-mode gradient program (outputs value + gradient;
/// the leading value output is dropped).
GradientSource make_ad_gradient(Program gradient_program);

/// Central-difference gradient over an interpreted objective program.
GradientSource make_numdiff_gradient(Program objective_program, StepRule rule = {});

} // namespace adfit
