#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <variant>

#include "mfglab/config.hpp"
#include "mfglab/errors.hpp"

using namespace mfglab;
using namespace mfglab::config;

namespace {

std::string message_of(const std::string& text, const std::vector<std::string>& overrides = {}) {
  try {
    parse(text, overrides);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("defaults") {
  const auto c = parse("");
  CHECK(c.d == 1);
  CHECK(c.n == 64);
  CHECK(c.s == 6.0);
  CHECK(c.n_steps == 200);
  CHECK(c.hamiltonian == "coupled_quadratic");
  CHECK(c.picard_tol == 1e-9);
  CHECK(c.linear_tol == 1e-12);
  CHECK(c.taylor_radius == 8.0);
  CHECK(c.stability_scale == 0.02);
  CHECK(c.workers == 1);
}

TEST_CASE("sections, lists and overrides") {
  const auto c = parse(
      "[grid]\nn = 32\n[hminus]\nk_max = 8\n"
      "[hamiltonian]\nname = separable\nparams = 2.5\n"
      "[master]\nuniqueness = true\n"
      "[norms]\nindices = 0, -2.5, 3\n",
      {"time.n_steps=80", "payoff.g=linear"});
  CHECK(c.n == 32);
  CHECK(c.hamiltonian == "separable");
  CHECK(c.hamiltonian_params == std::vector<double>{2.5});
  CHECK(c.uniqueness);
  CHECK(c.norms_indices == std::vector<double>{0.0, -2.5, 3.0});
  CHECK(c.n_steps == 80);
  CHECK(c.g == "linear");
  CHECK(hamiltonian_of(c).params == std::vector<double>{2.5});
}

TEST_CASE("rejections name the offending key") {
  CHECK(message_of("[grid]\nsize = 3\n") == "unknown config key 'grid.size'");
  CHECK(message_of("", {"time.n_steps"}) == "override 'time.n_steps' is not key=value");
  CHECK(message_of("[time]\nn_steps = 2.5\n").find("time.n_steps") != std::string::npos);
  CHECK(message_of("[picard]\ntol = nan\n").find("not a finite number") != std::string::npos);
  CHECK(message_of("[master]\nuniqueness = maybe\n").find("not a boolean") != std::string::npos);
  CHECK(message_of("", {"sobolev.s=4"}) ==
        "sobolev.s = 4 violates s > 5 = max{ceil((d+5)/2)+1, 4 ceil(d/2)+1} for d = 1");
  CHECK(message_of("", {"sobolev.r=0.9"}).find("r > ceil(d/2)") != std::string::npos);
  CHECK(message_of("", {"sobolev.r=1.5"}).find("4r + 1 <= s") != std::string::npos);
  CHECK(message_of("", {"density.amplitude=1"}).find("density.amplitude") != std::string::npos);
  CHECK_THROWS_AS(load("/nonexistent/mfglab.ini"), ValidationError);
}

TEST_CASE("Sobolev floor by dimension") {
  CHECK(sobolev_floor(1) == 5);
  CHECK(sobolev_floor(2) == 5);
  CHECK(sobolev_floor(3) == 9);
  CHECK(message_of("", {"grid.d=3", "grid.n=8"}).find("for d = 3") != std::string::npos);
  CHECK(message_of("", {"grid.n=32"}) == "hminus needs 1 <= k_min <= k_max < n/2");
}

TEST_CASE("hash tracks the numerics only") {
  const auto base = parse("");
  const auto h = config_hash(base);
  CHECK(h.size() == 64);
  CHECK(config_hash(parse("", {"time.n_steps=100"})) != h);
  CHECK(config_hash(parse("", {"run.workers=4", "run.cache_dir=/tmp/x"})) == h);
  const auto entries = canonical_entries(base);
  CHECK(std::is_sorted(entries.begin(), entries.end()));
  CHECK(std::find(entries.begin(), entries.end(), std::pair<std::string, std::string>{"time.n_steps", "200"}) !=
        entries.end());
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("derived objects") {
  const auto c = parse("", {"grid.n=16", "hminus.k_max=4", "density.amplitude=0.2"});
  CHECK(grid_of(c).modes() == 16);
  CHECK(spectral::mass(initial_density(c)) == doctest::Approx(1.0).epsilon(1e-14));
  const auto mc = master_config_of(c);
  CHECK(mc.n_steps == 200);
  CHECK(mc.linear.tol == 1e-12);

  CHECK(std::holds_alternative<spectral::DiracAt>(datum_of(c)));
  const auto g = datum_of(parse("", {"grid.n=16", "hminus.k_max=4", "linear.datum=dirac_gradient:0:1.5"}));
  REQUIRE(std::holds_alternative<spectral::DiracGradientAt>(g));
  CHECK(std::get<spectral::DiracGradientAt>(g).y == std::vector<double>{1.5});
  CHECK(std::holds_alternative<spectral::ZeroMeanField>(datum_of(parse("", {"linear.datum=mode:3"}))));
  CHECK_THROWS_AS(datum_of(parse("", {"linear.datum=mode:32"})), ValidationError);
  CHECK_THROWS_AS(datum_of(parse("", {"linear.datum=dirac:0,1"})), ValidationError);
  CHECK_THROWS_AS(datum_of(parse("", {"linear.datum=gauss"})), ValidationError);
}
