#ifndef DROPSVM_MODEL_IO_HPP
#define DROPSVM_MODEL_IO_HPP

#include <iosfwd>
#include <string>
#include <variant>

#include "dropsvm/data.hpp"

namespace dropsvm {

/// Anything the trainers produce.
using AnyModel = std::variant<LinearModel, LatentModel, OneVsAllModel>;

/// Plain-text model format, one keyword per line, doubles in round-trip
/// precision:
///
///   dropsvm-model 1
///   type linear|latent|one-vs-all
///   loss hinge|logistic|svr
///   noise <kind> <param>
///   dim D
///   offset b
///   weights w_1 ... w_D        (linear)
///   hidden K                   (latent)
///   alpha <K values> x D rows  (latent, row-major)
///   weights w_1 ... w_K        (latent)
///
/// A one-vs-all file has `classes C` followed by C nested models, each
/// introduced by `class <id>`.
void write_model(std::ostream& out, const AnyModel& model);
AnyModel read_model(std::istream& in, const std::string& source_name);

void save_model(const std::string& path, const AnyModel& model);
AnyModel load_model(const std::string& path);

/// Raw score of a binary model, or the predicted class id of a one-vs-all
/// model, as a double.
double decide(const AnyModel& model, const SparseVector& x);

/// Predicted label: sign (ties to +1) for classifiers, the score for SVR
/// models, the class id for one-vs-all.
double predict_label(const AnyModel& model, const SparseVector& x);

std::size_t model_dim(const AnyModel& model);

}  // namespace dropsvm

#endif  // DROPSVM_MODEL_IO_HPP
