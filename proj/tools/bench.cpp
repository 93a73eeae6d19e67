// Compares the OpenMP kernels against their serial references: the matrix
// product against the naive triple loop, and parallel per-example batch
// gradients against a single-threaded pass. Both must agree bit-for-bit;
// timings show what the parallel paths buy on this machine.

#include <omp.h>

#include <cstdio>
#include <cstring>
#include <vector>

#include "dga/matrix.hpp"
#include "dga/model.hpp"
#include "dga/rng.hpp"

using namespace dga;

namespace {

Matrix random_matrix(SplitMix64& rng, std::size_t r, std::size_t c) {
  Matrix m(r, c);
  for (real& v : m.data) v = rng.uniform(-1, 1);
  return m;
}

bool bitwise_equal(const Matrix& a, const Matrix& b) {
  return a.same_shape(b) &&
         std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(real)) == 0;
}

void bench_matmul(std::size_t n, std::size_t k, std::size_t m, int iters) {
  SplitMix64 rng(1234);
  const Matrix a = random_matrix(rng, n, k);
  const Matrix b = random_matrix(rng, k, m);

  Matrix ref = matmul_reference(a, b);
  Matrix par = matmul(a, b);
  const bool same = bitwise_equal(ref, par);

  double t_ref = omp_get_wtime();
  for (int i = 0; i < iters; ++i) ref = matmul_reference(a, b);
  t_ref = omp_get_wtime() - t_ref;

  double t_par = omp_get_wtime();
  for (int i = 0; i < iters; ++i) par = matmul(a, b);
  t_par = omp_get_wtime() - t_par;

  std::printf("matmul %4zux%-4zu * %4zux%-4zu  serial %8.2f ms  parallel %8.2f ms  x%.2f  %s\n",
              n, k, k, m, 1e3 * t_ref / iters, 1e3 * t_par / iters, t_ref / t_par,
              same ? "bitwise-equal" : "MISMATCH");
}

std::vector<TokenizedPair> fake_batch(std::size_t count, std::size_t vocab, std::size_t len) {
  SplitMix64 rng(99);
  std::vector<TokenizedPair> batch(count);
  for (TokenizedPair& p : batch) {
    p.ids.resize(len);
    p.ids[0] = 2;
    p.ids[len - 1] = 2;
    p.ids[len / 2] = 3;
    for (std::size_t i = 1; i + 1 < len; ++i)
      if (i != len / 2) p.ids[i] = 4 + static_cast<int>(rng.next_below(vocab - 4));
    p.len_a = len / 2 - 1;
    p.len_b = len - p.len_a - 3;
    p.label = static_cast<int>(rng.next_below(2));
  }
  return batch;
}

void bench_batch_grad() {
  ModelConfig cfg;
  cfg.vocab_size = 100;
  cfg.dim = 64;
  cfg.layers = 2;
  cfg.attn = 200;
  cfg.classes = 2;
  Model model = build_model(cfg);
  model.init(7);

  const auto batch = fake_batch(32, cfg.vocab_size, 18);
  std::vector<GradStore> slots(batch.size());
  for (GradStore& s : slots) s = make_grad_store(model.params);

  auto run = [&](int threads) {
    omp_set_num_threads(threads);
    const double t0 = omp_get_wtime();
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < batch.size(); ++i) {
      zero_grad_store(slots[i]);
      example_loss_and_grad(model, batch[i], slots[i]);
    }
    const double dt = omp_get_wtime() - t0;
    model.params.zero_grads();
    for (const GradStore& s : slots) accumulate_grads(model.params, s);
    std::vector<Matrix> grads(model.params.size());
    for (std::size_t p = 0; p < model.params.size(); ++p) grads[p] = model.params[p].grad;
    return std::pair(dt, grads);
  };

  const int max_threads = omp_get_max_threads();
  const auto [t1, g1] = run(1);
  const auto [tn, gn] = run(max_threads);
  bool same = true;
  for (std::size_t p = 0; p < g1.size(); ++p) same = same && bitwise_equal(g1[p], gn[p]);

  std::printf("batch grad 32 pairs (d=64, L=2)    1 thread %8.2f ms  %d thread%s %8.2f ms  x%.2f  %s\n",
              1e3 * t1, max_threads, max_threads == 1 ? " " : "s", 1e3 * tn, t1 / tn,
              same ? "bitwise-equal" : "MISMATCH");
  omp_set_num_threads(max_threads);
}

}  // namespace

int main() {
  std::printf("threads available: %d\n\n", omp_get_max_threads());
  bench_matmul(128, 128, 128, 5);
  bench_matmul(256, 256, 256, 3);
  bench_matmul(64, 2048, 64, 3);
  std::printf("\n");
  bench_batch_grad();
  return 0;
}
