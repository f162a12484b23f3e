#include "iotc/atomizer.hpp"

namespace iotc {

std::vector<PAtom> atomize_thing(const ThingDescription& d, AtomizationMode mode) {
  const auto tid = normalize_symbol(d.thing_id, SymbolRole::ThingId);
  std::vector<PAtom> out;
  out.push_back(make_atom("SemanticWebThing", {tid}));
  out.push_back(make_atom("thingName", {tid, normalize_symbol(d.name)}));
  out.push_back(make_atom("thingDescription", {tid, normalize_symbol(d.description)}));

  for (const auto& r : d.resources) {
    const std::string kind(to_string(r.kind));
    const auto rname = normalize_symbol(r.name);
    out.push_back(make_atom("hasResources", {tid, kind, rname}));
    out.push_back(make_atom("Description", {kind, rname, normalize_symbol(r.description)}));
    if (!r.io) continue;
    const bool output = r.io->direction == IoDirection::Output;
    if (!output && mode == AtomizationMode::PaperCompat &&
        r.kind == ResourceKind::Actuator)
      continue;
    const std::string prefix = output ? "Output" : "Input";
    out.push_back(make_atom(prefix + "Name", {kind, rname, normalize_symbol(r.io->name)}));
    out.push_back(make_atom(prefix + "Description",
                            {kind, rname, normalize_symbol(r.io->description)}));
    out.push_back(make_atom(prefix + "Unit", {kind, rname, normalize_symbol(r.io->unit)}));
  }
  for (const auto& p : d.protocols)
    out.push_back(make_atom("supportsProtocol", {tid, normalize_symbol(p.name)}));
  for (const auto& s : d.security_problems)
    out.push_back(make_atom("hasSecurityProblem", {tid, normalize_symbol(s.name)}));
  return out;
}

std::vector<PAtom> atomize_cloud(const CloudServiceDescription& c) {
  const auto sid = normalize_symbol(c.service_id);
  std::vector<PAtom> out;
  out.push_back(make_atom("CloudService", {sid}));
  out.push_back(make_atom("serviceName", {sid, normalize_symbol(c.name)}));
  for (const auto& op : c.operations) {
    const auto name = normalize_symbol(op.name);
    out.push_back(make_atom("hasOperation", {sid, name}));
    if (!op.model_reference.empty())
      out.push_back(make_atom("modelReference",
                              {name, normalize_symbol(local_name(op.model_reference))}));
  }
  return out;
}

Problem build_problem(std::string name, std::string domain_name,
                      const std::vector<ThingDescription>& things,
                      const std::vector<CloudServiceDescription>& clouds,
                      std::vector<PAtom> tasks, AtomizationMode mode) {
  Problem p;
  p.name = std::move(name);
  p.domain_name = std::move(domain_name);
  for (const auto& t : things) {
    auto atoms = atomize_thing(t, mode);
    p.initial_state.insert(p.initial_state.end(), atoms.begin(), atoms.end());
  }
  for (const auto& c : clouds) {
    auto atoms = atomize_cloud(c);
    p.initial_state.insert(p.initial_state.end(), atoms.begin(), atoms.end());
  }
  p.task_list = std::move(tasks);
  check_problem(p);
  return p;
}

}  // namespace iotc
