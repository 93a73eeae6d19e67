#include <doctest.h>

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "dga/encoder.hpp"
#include "dga/errors.hpp"
#include "dga/gru.hpp"
#include "dga/matrix.hpp"
#include "dga/params.hpp"
#include "dga/rng.hpp"

using namespace dga;

namespace {

TokenizedPair fake_pair(std::vector<int> ids) {
  TokenizedPair p;
  p.ids = std::move(ids);
  p.len_a = 1;
  p.len_b = p.ids.size() - 4;
  return p;
}

Vec random_vec(SplitMix64& rng, std::size_t n, real scale = real(0.5)) {
  Vec v(n);
  for (real& x : v) x = static_cast<real>(rng.uniform(-scale, scale));
  return v;
}

void randomize(ModelParams& params, std::uint64_t seed, real scale = real(0.5)) {
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < params.size(); ++i)
    for (real& x : params[i].value.data) x = static_cast<real>(rng.uniform(-scale, scale));
}

// Gate formulas evaluated one scalar lane at a time in extended precision.
std::vector<long double> scalar_gru(const ModelParams& params, const GruCellIdx& c,
                                    const Vec& x, const Vec& h_prev) {
  const std::size_t d = c.state_dim, in = c.in_dim;
  auto dotrow = [&](std::size_t pid, std::size_t i, const Vec& v, std::size_t n) {
    long double acc = 0;
    for (std::size_t j = 0; j < n; ++j) acc += static_cast<long double>(params.value(pid).at(i, j)) * v[j];
    return acc;
  };
  std::vector<long double> h(d);
  std::vector<long double> rv(d);
  for (std::size_t i = 0; i < d; ++i) {
    const long double ar = dotrow(c.wr, i, x, in) + dotrow(c.ur, i, h_prev, d) + params.value(c.br).data[i];
    rv[i] = 1.0L / (1.0L + std::exp(-ar));
  }
  for (std::size_t i = 0; i < d; ++i) {
    const long double az = dotrow(c.wz, i, x, in) + dotrow(c.uz, i, h_prev, d) + params.value(c.bz).data[i];
    const long double z = 1.0L / (1.0L + std::exp(-az));
    long double an = dotrow(c.wh, i, x, in) + params.value(c.bh).data[i];
    for (std::size_t j = 0; j < d; ++j)
      an += static_cast<long double>(params.value(c.uh).at(i, j)) * rv[j] * h_prev[j];
    const long double n = std::tanh(an);
    h[i] = (1.0L - z) * h_prev[i] + z * n;
  }
  return h;
}

}  // namespace

TEST_CASE("gru cell: zero weights and zero state give zero output") {
  ModelParams params;
  const GruCellIdx c = register_gru_cell(params, "cell", 3, 4);
  for (std::size_t i = 0; i < params.size(); ++i)
    std::fill(params[i].value.data.begin(), params[i].value.data.end(), real(0));
  const Vec out = gru_cell_forward(params, c, Vec{real(1), real(-2), real(3)}, Vec(4, real(0)));
  for (real v : out) CHECK(v == real(0));
}

TEST_CASE("gru cell: saturated update gate passes the previous state through") {
  ModelParams params;
  const GruCellIdx c = register_gru_cell(params, "cell", 2, 3);
  params.init_values(11);
  Matrix& bz = params[c.bz].value;
  std::fill(bz.data.begin(), bz.data.end(), real(-50));  // z = sigmoid(-50+eps) ~ 0
  const Vec h_prev{real(0.3), real(-0.7), real(1.1)};
  const Vec out = gru_cell_forward(params, c, Vec{real(0.5), real(-0.2)}, h_prev);
  for (std::size_t i = 0; i < 3; ++i) CHECK(out[i] == doctest::Approx(h_prev[i]).epsilon(1e-9));
}

TEST_CASE("gru cell matches a scalar extended-precision reference") {
  ModelParams params;
  const GruCellIdx c = register_gru_cell(params, "cell", 3, 5);
  SplitMix64 rng(99);
  for (int rep = 0; rep < 20; ++rep) {
    randomize(params, 1000 + static_cast<std::uint64_t>(rep));
    const Vec x = random_vec(rng, 3);
    const Vec h_prev = random_vec(rng, 5);
    const Vec out = gru_cell_forward(params, c, x, h_prev);
    const auto ref = scalar_gru(params, c, x, h_prev);
    for (std::size_t i = 0; i < 5; ++i)
      CHECK(std::abs(static_cast<long double>(out[i]) - ref[i]) < 1e-12L);
  }
}

TEST_CASE("encoder: all-zero parameters produce zero states and zero h_g") {
  ModelParams params;
  const EncoderIdx enc = register_encoder(params, 10, 4, 2);
  for (std::size_t i = 0; i < params.size(); ++i)
    std::fill(params[i].value.data.begin(), params[i].value.data.end(), real(0));
  const EncoderTrace tr = encode(params, enc, fake_pair({2, 5, 3, 6, 2}));
  for (real v : tr.H.data) CHECK(v == real(0));
  for (real v : tr.h_g) CHECK(v == real(0));
}

TEST_CASE("encoder: one layer's mixed output is that layer's states") {
  ModelParams params;
  const EncoderIdx enc = register_encoder(params, 10, 4, 1);
  params.init_values(3);
  const EncoderTrace tr = encode(params, enc, fake_pair({2, 5, 3, 6, 2}));
  CHECK(tr.mix_weights == Vec{real(1)});
  for (std::size_t t = 0; t < tr.H.rows; ++t)
    for (std::size_t j = 0; j < tr.H.cols; ++j) CHECK(tr.H.at(t, j) == tr.states[0].at(t, j));
}

TEST_CASE("encoder: two layers with zero mix weights average the stacks") {
  ModelParams params;
  const EncoderIdx enc = register_encoder(params, 10, 4, 2);
  params.init_values(4);
  const EncoderTrace tr = encode(params, enc, fake_pair({2, 7, 3, 8, 2}));
  CHECK(tr.mix_weights[0] == doctest::Approx(0.5).epsilon(1e-12));
  for (std::size_t t = 0; t < tr.H.rows; ++t)
    for (std::size_t j = 0; j < tr.H.cols; ++j) {
      const real avg = (tr.states[0].at(t, j) + tr.states[1].at(t, j)) / real(2);
      CHECK(tr.H.at(t, j) == doctest::Approx(avg).epsilon(1e-12));
    }
}

TEST_CASE("encoder: h_g is the top layer's first-position state") {
  ModelParams params;
  const EncoderIdx enc = register_encoder(params, 10, 4, 3);
  params.init_values(5);
  const EncoderTrace tr = encode(params, enc, fake_pair({2, 5, 3, 9, 2}));
  for (std::size_t j = 0; j < 4; ++j) CHECK(tr.h_g[j] == tr.states[2].at(0, j));
}

TEST_CASE("encoder: mix weights stay a strictly positive unit simplex") {
  SplitMix64 rng(17);
  for (int rep = 0; rep < 50; ++rep) {
    ModelParams params;
    const std::size_t L = 1 + rng.next_below(4);
    const EncoderIdx enc = register_encoder(params, 10, 3, L);
    randomize(params, 300 + static_cast<std::uint64_t>(rep), real(3));
    const EncoderTrace tr = encode(params, enc, fake_pair({2, 5, 3, 6, 2}));
    real sum = 0;
    for (real w : tr.mix_weights) {
      CHECK(w > real(0));
      sum += w;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("encoder: repeat runs are bit-identical") {
  ModelParams params;
  const EncoderIdx enc = register_encoder(params, 12, 6, 2);
  params.init_values(8);
  const TokenizedPair p = fake_pair({2, 4, 5, 3, 6, 7, 2});
  const EncoderTrace a = encode(params, enc, p);
  const EncoderTrace b = encode(params, enc, p);
  REQUIRE(a.H.data.size() == b.H.data.size());
  CHECK(std::memcmp(a.H.data.data(), b.H.data.data(), a.H.data.size() * sizeof(real)) == 0);
  CHECK(std::memcmp(a.h_g.data(), b.h_g.data(), a.h_g.size() * sizeof(real)) == 0);
}

TEST_CASE("encoder: out-of-range token id is rejected") {
  ModelParams params;
  const EncoderIdx enc = register_encoder(params, 10, 4, 1);
  params.init_values(9);
  CHECK_THROWS_AS(encode(params, enc, fake_pair({2, 10, 3, 5, 2})), std::out_of_range);
  CHECK_THROWS_AS(encode(params, enc, fake_pair({2, -1, 3, 5, 2})), std::out_of_range);
}

TEST_CASE("external vectors run through the recurrent stack directly") {
  ModelParams params;
  const EncoderIdx enc = register_external_encoder(params, 5, 4);
  params.init_values(10);
  SplitMix64 rng(20);
  Matrix inputs(6, 5);
  for (real& v : inputs.data) v = static_cast<real>(rng.uniform(-1.0, 1.0));
  const EncoderTrace tr = encode_vectors(params, enc, inputs);
  CHECK(tr.H.rows == 6);
  CHECK(tr.H.cols == 4);
  CHECK(tr.mix_weights == Vec{real(1)});
  Matrix wrong(6, 4);
  CHECK_THROWS_AS(encode_vectors(params, enc, wrong), DimensionError);
}
