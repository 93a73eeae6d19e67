#include "dga/gru.hpp"

#include <cmath>

#include "dga/errors.hpp"

namespace dga {

GruCellIdx register_gru_cell(ModelParams& params, const std::string& prefix,
                             std::size_t in_dim, std::size_t state_dim) {
  GruCellIdx c;
  c.in_dim = in_dim;
  c.state_dim = state_dim;
  c.wz = params.add(prefix + ".wz", state_dim, in_dim, Init::Xavier);
  c.wr = params.add(prefix + ".wr", state_dim, in_dim, Init::Xavier);
  c.wh = params.add(prefix + ".wh", state_dim, in_dim, Init::Xavier);
  c.uz = params.add(prefix + ".uz", state_dim, state_dim, Init::Xavier);
  c.ur = params.add(prefix + ".ur", state_dim, state_dim, Init::Xavier);
  c.uh = params.add(prefix + ".uh", state_dim, state_dim, Init::Xavier);
  c.bz = params.add(prefix + ".bz", state_dim, 1, Init::Zero);
  c.br = params.add(prefix + ".br", state_dim, 1, Init::Zero);
  c.bh = params.add(prefix + ".bh", state_dim, 1, Init::Zero);
  return c;
}

Vec gru_cell_forward(const ModelParams& params, const GruCellIdx& c,
                     const Vec& x, const Vec& h_prev, GruCellCache* cache) {
  if (x.size() != c.in_dim || h_prev.size() != c.state_dim)
    throw DimensionError("gru_cell_forward: input " + std::to_string(x.size()) + ", state " +
                         std::to_string(h_prev.size()));
  const std::size_t d = c.state_dim;

  Vec az = matvec(params.value(c.wz), x);
  add_inplace(az, matvec(params.value(c.uz), h_prev));
  add_inplace(az, params.value(c.bz).data);
  Vec z = sigmoid(az);

  Vec ar = matvec(params.value(c.wr), x);
  add_inplace(ar, matvec(params.value(c.ur), h_prev));
  add_inplace(ar, params.value(c.br).data);
  Vec r = sigmoid(ar);

  Vec rh(d);
  for (std::size_t i = 0; i < d; ++i) rh[i] = r[i] * h_prev[i];
  Vec an = matvec(params.value(c.wh), x);
  add_inplace(an, matvec(params.value(c.uh), rh));
  add_inplace(an, params.value(c.bh).data);
  Vec n = tanh_vec(an);

  Vec h(d);
  for (std::size_t i = 0; i < d; ++i) h[i] = (real(1) - z[i]) * h_prev[i] + z[i] * n[i];

  if (cache) {
    cache->z = std::move(z);
    cache->r = std::move(r);
    cache->n = std::move(n);
  }
  return h;
}

void gru_cell_backward(const ModelParams& params, const GruCellIdx& c,
                       const Vec& x, const Vec& h_prev, const GruCellCache& cache,
                       const Vec& dh, GradStore& gs, Vec& dx, Vec& dh_prev) {
  const std::size_t d = c.state_dim;
  const Vec& z = cache.z;
  const Vec& r = cache.r;
  const Vec& n = cache.n;

  Vec dz(d), dn(d);
  for (std::size_t i = 0; i < d; ++i) {
    dz[i] = dh[i] * (n[i] - h_prev[i]);
    dn[i] = dh[i] * z[i];
    dh_prev[i] += dh[i] * (real(1) - z[i]);
  }

  // candidate branch
  Vec dan(d), rh(d);
  for (std::size_t i = 0; i < d; ++i) {
    dan[i] = dn[i] * (real(1) - n[i] * n[i]);
    rh[i] = r[i] * h_prev[i];
  }
  add_outer(gs[c.wh], dan, x);
  add_outer(gs[c.uh], dan, rh);
  add_inplace(gs[c.bh].data, dan);
  add_inplace(dx, matvec_t(params.value(c.wh), dan));
  Vec drh = matvec_t(params.value(c.uh), dan);
  Vec dr(d);
  for (std::size_t i = 0; i < d; ++i) {
    dr[i] = drh[i] * h_prev[i];
    dh_prev[i] += drh[i] * r[i];
  }

  // update gate
  Vec daz(d);
  for (std::size_t i = 0; i < d; ++i) daz[i] = dz[i] * z[i] * (real(1) - z[i]);
  add_outer(gs[c.wz], daz, x);
  add_outer(gs[c.uz], daz, h_prev);
  add_inplace(gs[c.bz].data, daz);
  add_inplace(dx, matvec_t(params.value(c.wz), daz));
  add_inplace(dh_prev, matvec_t(params.value(c.uz), daz));

  // reset gate
  Vec dar(d);
  for (std::size_t i = 0; i < d; ++i) dar[i] = dr[i] * r[i] * (real(1) - r[i]);
  add_outer(gs[c.wr], dar, x);
  add_outer(gs[c.ur], dar, h_prev);
  add_inplace(gs[c.br].data, dar);
  add_inplace(dx, matvec_t(params.value(c.wr), dar));
  add_inplace(dh_prev, matvec_t(params.value(c.ur), dar));
}

}  // namespace dga
