#pragma once

#include <string>
#include <vector>

#include "iotc/shop.hpp"
#include "iotc/symbol.hpp"
#include "iotc/thing_model.hpp"

namespace iotc {

/// General emits Input atoms symmetrically with Output atoms; PaperCompat
/// suppresses actuator Input atoms to match the reference problem fixture.
enum class AtomizationMode { General, PaperCompat };

std::vector<PAtom> atomize_thing(const ThingDescription& d, AtomizationMode mode);
std::vector<PAtom> atomize_cloud(const CloudServiceDescription& c);

Problem build_problem(std::string name, std::string domain_name,
                      const std::vector<ThingDescription>& things,
                      const std::vector<CloudServiceDescription>& clouds,
                      std::vector<PAtom> tasks, AtomizationMode mode);

}  // namespace iotc
