#pragma once

#include <string>

#include "jlcid/model_spec.hpp"
#include "jlcid/subject.hpp"

namespace jlcid {

// Events file: id,t0,l,r,delta_a,t,delta_d,<covariate columns...>
//   ages in years; an empty r means never diagnosed (+inf).
// Observations file: id,marker,time,value,<covariate columns...>
//   marker is 1-based, time is an age in years (the model's time transform
//   is applied on load); rows with an empty value are skipped.
Dataset load_dataset(const std::string& events_path, const std::string& obs_path,
                     const ModelSpec& spec);

void write_dataset(const std::string& events_path, const std::string& obs_path,
                   const Dataset& data, const ModelSpec& spec);

}  // namespace jlcid
