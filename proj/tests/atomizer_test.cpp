#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "generators.hpp"
#include "iotc/atomizer.hpp"
#include "iotc/shop.hpp"
#include "test_support.hpp"

using namespace iotc;

namespace {

const Vocabulary& vocab() {
  static const Vocabulary v = load_vocabulary_file(testing::data_path("myont.vocab"));
  return v;
}

ThingDescription thing(const std::string& name) {
  return expand_thing(parse_json_preserving(testing::fixture(name)), vocab());
}

std::vector<std::string> texts(const std::vector<PAtom>& atoms) {
  std::vector<std::string> out;
  for (const auto& a : atoms) out.push_back(to_string(a));
  return out;
}

const std::vector<PAtom>& fixture_state() {
  static const auto state = parse_problem_text(testing::fixture("iot_problem.shop")).initial_state;
  return state;
}

}  // namespace

TEST_CASE("normalize_symbol") {
  CHECK(normalize_symbol("Arduino Yun with temperature sensor") ==
        "Arduino_Yun_with_temperature_sensor");
  CHECK(normalize_symbol("02 long LED") == "long_LED");
  CHECK(normalize_symbol("X") == "X");
  CHECK(normalize_symbol("2341", SymbolRole::ThingId) == "SemanticWebThing_2341");
  CHECK(normalize_symbol("  a \t b  ") == "a_b");
  CHECK(normalize_symbol("f(x); y") == "f_x___y");
  CHECK(normalize_symbol("?v") == "_v");
  CHECK(normalize_symbol("42") == "42");
  CHECK_THROWS_AS(normalize_symbol("   "), SymbolError);
  CHECK_THROWS_AS(normalize_symbol(""), SymbolError);
}

TEST_CASE("PaperCompat reproduces the problem fixture per thing") {
  const auto& state = fixture_state();
  const auto yun = atomize_thing(thing("arduino_yun.jsonld"), AtomizationMode::PaperCompat);
  const auto bits = atomize_thing(thing("littlebits_cloudbit.jsonld"), AtomizationMode::PaperCompat);
  REQUIRE(yun.size() == 13);
  REQUIRE(bits.size() == 8);
  CHECK(yun == std::vector<PAtom>(state.begin(), state.begin() + 13));
  CHECK(bits == std::vector<PAtom>(state.begin() + 13, state.end()));
}

TEST_CASE("General mode adds the actuator input atoms") {
  const auto d = thing("littlebits_cloudbit.jsonld");
  const auto general = atomize_thing(d, AtomizationMode::General);
  REQUIRE(general.size() == 11);
  const auto t = texts(general);
  CHECK(t[5] == "(InputName Actuator long_LED input_voltage)");
  CHECK(t[6] == "(InputDescription Actuator long_LED input_voltage_in_percentage)");
  CHECK(t[7] == "(InputUnit Actuator long_LED percent)");
  for (const auto& name : {"arduino_yun.jsonld", "littlebits_cloudbit.jsonld"}) {
    const auto g = atomize_thing(thing(name), AtomizationMode::General);
    for (const auto& a : atomize_thing(thing(name), AtomizationMode::PaperCompat))
      CHECK(std::find(g.begin(), g.end(), a) != g.end());
  }
  CHECK(atomize_thing(d, AtomizationMode::General) == general);
}

TEST_CASE("atomize_cloud") {
  const auto c = parse_sawsdl(testing::fixture("cloud_storage.wsdl"));
  CHECK(texts(atomize_cloud(c)) ==
        std::vector<std::string>{"(CloudService AzureBlobMock)",
                                 "(serviceName AzureBlobMock Azure_Blob_Mock)",
                                 "(hasOperation AzureBlobMock putObject)",
                                 "(modelReference putObject StorageService)"});
  CloudServiceDescription none{"S", "Empty service", {}};
  CHECK(atomize_cloud(none).size() == 2);
  CloudServiceDescription two{"S", "S", {{"b", {}, {}, ""}, {"a", {}, {}, "myont:StorageService"}}};
  CHECK(texts(atomize_cloud(two)) ==
        std::vector<std::string>{"(CloudService S)", "(serviceName S S)", "(hasOperation S b)",
                                 "(hasOperation S a)", "(modelReference a StorageService)"});
}

TEST_CASE("build_problem") {
  const std::vector<ThingDescription> things{thing("arduino_yun.jsonld"),
                                             thing("littlebits_cloudbit.jsonld")};
  const auto task = make_atom("composeIoTServices", {"DS18B20", "long_LED"});
  const auto p = build_problem("problem", "iot", things, {}, {task}, AtomizationMode::PaperCompat);
  CHECK(p == parse_problem_text(testing::fixture("iot_problem.shop")));

  const auto empty = build_problem("p", "d", {}, {}, {}, AtomizationMode::General);
  CHECK(empty.initial_state.empty());
  CHECK(empty.task_list.empty());

  const auto cloud = parse_sawsdl(testing::fixture("cloud_storage.wsdl"));
  const auto with_cloud =
      build_problem("p", "iot", things, {cloud}, {make_atom("composeSensorToCloud", {"DS18B20", "putObject"})},
                    AtomizationMode::PaperCompat);
  CHECK(with_cloud.initial_state.size() == 25);

  CHECK_THROWS(build_problem("p", "d", {}, {}, {make_atom("t", {"?x"})}, AtomizationMode::General));
}

TEST_CASE("random descriptions atomize to ground atoms") {
  testing::Gen g(3);
  const std::vector<std::string> words{"temp", "02 LED", "Wi Fi", "a(b)", "x;y", "?q", "7 up", "z"};
  for (int i = 0; i < 200; ++i) {
    ThingDescription d;
    d.thing_id = std::to_string(g.range(1, 9999));
    d.name = g.pick(words);
    d.description = g.pick(words);
    const int n_res = g.range(0, 3);
    for (int r = 0; r < n_res; ++r) {
      ResourceSpec spec;
      spec.kind = g.chance(0.5) ? ResourceKind::Sensor : ResourceKind::Actuator;
      spec.name = g.pick(words);
      spec.description = g.pick(words);
      if (g.chance(0.7))
        spec.io = IoValueSpec{spec.kind == ResourceKind::Sensor ? IoDirection::Output : IoDirection::Input,
                              g.pick(words), g.pick(words), g.pick(words)};
      d.resources.push_back(spec);
    }
    for (int k = g.range(0, 2); k > 0; --k) d.protocols.push_back({g.pick(words), ""});
    for (int k = g.range(0, 2); k > 0; --k) d.security_problems.push_back({g.pick(words), ""});
    for (auto mode : {AtomizationMode::General, AtomizationMode::PaperCompat}) {
      const auto atoms = atomize_thing(d, mode);
      CHECK(atoms == atomize_thing(d, mode));
      for (const auto& a : atoms) CHECK_MESSAGE(a.is_ground(), to_string(a));
      // Printing and reading the atoms back must not change them.
      Problem p{"p", "d", atoms, {}};
      CHECK(parse_problem_text(print_problem(p)) == p);
    }
  }
}
