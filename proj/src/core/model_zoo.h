#pragma once

#include <memory>
#include <string>

#include "core/model.h"

namespace scorecf {

// Builds a classifier from a builtin spec string:
//   const:<class_index>                     one-hot constant model
//   rule:pitch_class:<pc>                   note's own pitch class
//   rule:onset_peer:<pc>                    same-onset peer with pitch class
//   rule:cadence                            tonic/dominant note with a peer
//   gnn[:k=v,...]                           untrained reference network
//   gnn_trained[:k=v,...]                   reference network fitted to the
//                                           synthetic cadence task
// gnn keys: layers, hidden, classes, seed; gnn_trained adds pieces, notes,
// epochs, lr. Throws ValidationError on unknown specs.
std::unique_ptr<NodeClassifier> createBuiltinModel(const std::string& spec);

}  // namespace scorecf
