#include <doctest.h>

#include <cmath>
#include <vector>

#include "echoslam/errors.hpp"
#include "echoslam/nn/graph.hpp"
#include "echoslam/nn/layers.hpp"
#include "echoslam/nn/rng.hpp"
#include "test_util.hpp"

using namespace echoslam;
using namespace echoslam::nn;
using testutil::rand_tensor;

namespace {

// Reference attention written as straight-line loops over plain arrays;
// shares no code with the graph ops.
Tensor mhsa_reference(const Tensor& x, const ParameterSet& p, int heads) {
  const int t_len = x.dim(0), d = x.dim(1);
  const int dh = d / heads;
  auto lin = [&](const Tensor& in, const Tensor& w, const Tensor& b) {
    Tensor out = Tensor::zeros({in.dim(0), w.dim(1)});
    for (int i = 0; i < in.dim(0); ++i)
      for (int j = 0; j < w.dim(1); ++j) {
        double acc = b[j];
        for (int kk = 0; kk < in.dim(1); ++kk) acc += in.at(i, kk) * w.at(kk, j);
        out.at(i, j) = acc;
      }
    return out;
  };
  Tensor q = lin(x, p.get("attn.q.w").tensor(), p.get("attn.q.b").tensor());
  Tensor k = lin(x, p.get("attn.k.w").tensor(), p.get("attn.k.b").tensor());
  Tensor v = lin(x, p.get("attn.v.w").tensor(), p.get("attn.v.b").tensor());
  Tensor concat = Tensor::zeros({t_len, d});
  for (int h = 0; h < heads; ++h) {
    for (int i = 0; i < t_len; ++i) {
      std::vector<double> score(t_len);
      double mx = -1e300;
      for (int j = 0; j < t_len; ++j) {
        double acc = 0.0;
        for (int t = 0; t < dh; ++t)
          acc += q.at(i, h * dh + t) * k.at(j, h * dh + t);
        score[j] = acc / std::sqrt(static_cast<double>(dh));
        mx = std::max(mx, score[j]);
      }
      double z = 0.0;
      for (int j = 0; j < t_len; ++j) {
        score[j] = std::exp(score[j] - mx);
        z += score[j];
      }
      for (int t = 0; t < dh; ++t) {
        double acc = 0.0;
        for (int j = 0; j < t_len; ++j) acc += score[j] / z * v.at(j, h * dh + t);
        concat.at(i, h * dh + t) = acc;
      }
    }
  }
  return lin(concat, p.get("attn.o.w").tensor(), p.get("attn.o.b").tensor());
}

// Reference circular conv built on an explicitly wrapped padded buffer.
Tensor conv_reference(const Tensor& x, const Tensor& w, const Tensor& b,
                      int stride) {
  const int c_in = x.dim(0), len = x.dim(1);
  const int c_out = w.dim(0), k = w.dim(2);
  const int pad = (k - 1) / 2;
  std::vector<std::vector<double>> padded(
      c_in, std::vector<double>(len + 2 * pad, 0.0));
  for (int ic = 0; ic < c_in; ++ic) {
    for (int j = 0; j < len; ++j) padded[ic][pad + j] = x.at(ic, j);
    for (int j = 0; j < pad; ++j) {
      padded[ic][j] = x.at(ic, len - pad + j);
      padded[ic][pad + len + j] = x.at(ic, j);
    }
  }
  Tensor out = Tensor::zeros({c_out, len / stride});
  for (int oc = 0; oc < c_out; ++oc)
    for (int j = 0; j < len / stride; ++j) {
      double acc = b[oc];
      for (int ic = 0; ic < c_in; ++ic)
        for (int t = 0; t < k; ++t)
          acc += w.at(oc, ic, t) * padded[ic][j * stride + t];
      out.at(oc, j) = acc;
    }
  return out;
}

}  // namespace

TEST_CASE("gelu matches the exact erf form at known points") {
  Value x = Value::constant(Tensor::from({1, 3}, {0.0, 1.0, -1.0}));
  Value y = gelu(x);
  CHECK(y.tensor()[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(y.tensor()[1] == doctest::Approx(0.8413447460685429).epsilon(1e-12));
  CHECK(y.tensor()[2] == doctest::Approx(-0.15865525393145707).epsilon(1e-12));
}

TEST_CASE("softmax rows sum to one and are shift invariant") {
  Rng rng(5);
  Tensor t = rand_tensor(rng, {4, 9}, -3.0, 3.0);
  Value s = softmax_rows(Value::constant(t));
  for (int i = 0; i < 4; ++i) {
    double sum = 0.0;
    for (int j = 0; j < 9; ++j) {
      sum += s.tensor().at(i, j);
      CHECK(s.tensor().at(i, j) > 0.0);
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
  Tensor shifted = t;
  for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] += 100.0;
  Value s2 = softmax_rows(Value::constant(shifted));
  for (std::size_t i = 0; i < s.tensor().size(); ++i) {
    CHECK(s.tensor()[i] == doctest::Approx(s2.tensor()[i]).epsilon(1e-12));
  }
}

TEST_CASE("layer norm normalizes each row") {
  // eps = 0 so the expected values are exact: [1,2,3] -> +-sqrt(3/2).
  Value x = Value::constant(Tensor::from({1, 3}, {1.0, 2.0, 3.0}));
  Value g = Value::constant(Tensor::full({1, 3}, 1.0));
  Value b = Value::constant(Tensor::zeros({1, 3}));
  Value y = layer_norm_rows(x, g, b, 0.0);
  const double e = std::sqrt(1.5);
  CHECK(y.tensor()[0] == doctest::Approx(-e).epsilon(1e-12));
  CHECK(y.tensor()[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(y.tensor()[2] == doctest::Approx(e).epsilon(1e-12));

  Rng rng(21);
  Tensor big = rand_tensor(rng, {5, 64}, -2.0, 2.0);
  Value yn = layer_norm_rows(Value::constant(big),
                             Value::constant(Tensor::full({1, 64}, 1.0)),
                             Value::constant(Tensor::zeros({1, 64})));
  for (int i = 0; i < 5; ++i) {
    double mean = 0.0, var = 0.0;
    for (int j = 0; j < 64; ++j) mean += yn.tensor().at(i, j);
    mean /= 64;
    for (int j = 0; j < 64; ++j) {
      const double d = yn.tensor().at(i, j) - mean;
      var += d * d;
    }
    var /= 64;
    CHECK(std::fabs(mean) < 1e-10);
    CHECK(var == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("mhsa matches a straight-line reference") {
  Rng rng(42);
  ParameterSet params;
  add_mhsa(params, "attn", 4, rng);
  Tensor x = rand_tensor(rng, {3, 4});
  Value out = mhsa_forward(Value::constant(x), params, "attn", 2);
  Tensor expect = mhsa_reference(x, params, 2);
  REQUIRE(out.tensor().same_shape(expect));
  for (std::size_t i = 0; i < expect.size(); ++i) {
    CHECK(out.tensor()[i] == doctest::Approx(expect[i]).epsilon(1e-12));
  }
}

TEST_CASE("mhsa with no mask is row-permutation equivariant") {
  Rng rng(43);
  ParameterSet params;
  add_mhsa(params, "attn", 8, rng);
  Tensor x = rand_tensor(rng, {3, 8});
  Tensor xp = x;
  for (int j = 0; j < 8; ++j) std::swap(xp.at(0, j), xp.at(2, j));
  Tensor y = mhsa_forward(Value::constant(x), params, "attn", 4).tensor();
  Tensor yp = mhsa_forward(Value::constant(xp), params, "attn", 4).tensor();
  for (int j = 0; j < 8; ++j) {
    CHECK(y.at(0, j) == doctest::Approx(yp.at(2, j)).epsilon(1e-12));
    CHECK(y.at(1, j) == doctest::Approx(yp.at(1, j)).epsilon(1e-12));
    CHECK(y.at(2, j) == doctest::Approx(yp.at(0, j)).epsilon(1e-12));
  }
}

TEST_CASE("circular conv matches a padded-buffer reference") {
  Rng rng(17);
  for (int stride : {1, 2}) {
    Tensor x = rand_tensor(rng, {2, 12});
    Tensor w = rand_tensor(rng, {3, 2, 5});
    Tensor b = rand_tensor(rng, {1, 3});
    Value out = conv1d_circular(Value::constant(x), Value::constant(w),
                                Value::constant(b), stride);
    Tensor expect = conv_reference(x, w, b, stride);
    REQUIRE(out.tensor().same_shape(expect));
    for (std::size_t i = 0; i < expect.size(); ++i) {
      CHECK(out.tensor()[i] == doctest::Approx(expect[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("circular conv commutes with circular shifts") {
  Rng rng(18);
  Tensor x = rand_tensor(rng, {2, 16});
  Tensor w = rand_tensor(rng, {3, 2, 7});
  Tensor b = rand_tensor(rng, {1, 3});

  SUBCASE("stride 1: any shift") {
    const int s = 5;
    Value y = conv1d_circular(Value::constant(x), Value::constant(w),
                              Value::constant(b), 1);
    Value xs = roll_cols(Value::constant(x), s);
    Value ys = conv1d_circular(xs, Value::constant(w), Value::constant(b), 1);
    Value y_rolled = roll_cols(y, s);
    for (std::size_t i = 0; i < ys.tensor().size(); ++i) {
      CHECK(ys.tensor()[i] ==
            doctest::Approx(y_rolled.tensor()[i]).epsilon(1e-12));
    }
  }

  SUBCASE("stride 2: shifts divisible by the stride") {
    const int s = 6;
    Value y = conv1d_circular(Value::constant(x), Value::constant(w),
                              Value::constant(b), 2);
    Value xs = roll_cols(Value::constant(x), s);
    Value ys = conv1d_circular(xs, Value::constant(w), Value::constant(b), 2);
    Value y_rolled = roll_cols(y, s / 2);
    for (std::size_t i = 0; i < ys.tensor().size(); ++i) {
      CHECK(ys.tensor()[i] ==
            doctest::Approx(y_rolled.tensor()[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("linear ops map zeros to zeros") {
  Value zx = Value::constant(Tensor::zeros({3, 4}));
  Value zw = Value::constant(Tensor::zeros({4, 2}));
  Value y = matmul(zx, zw);
  for (std::size_t i = 0; i < y.tensor().size(); ++i) CHECK(y.tensor()[i] == 0.0);

  Value cx = Value::constant(Tensor::zeros({2, 8}));
  Value cw = Value::constant(Tensor::zeros({3, 2, 3}));
  Value cb = Value::constant(Tensor::zeros({1, 3}));
  Value cy = conv1d_circular(cx, cw, cb, 2);
  for (std::size_t i = 0; i < cy.tensor().size(); ++i) CHECK(cy.tensor()[i] == 0.0);
}

TEST_CASE("structural ops: cols, hcat, flatten, roll") {
  Tensor t = Tensor::from({2, 4}, {0, 1, 2, 3, 10, 11, 12, 13});
  Value v = Value::constant(t);
  Value c = cols(v, 1, 2);
  CHECK(c.tensor().at(0, 0) == 1.0);
  CHECK(c.tensor().at(1, 1) == 12.0);

  Value cat = hcat({c, c});
  CHECK(cat.tensor().dim(1) == 4);
  CHECK(cat.tensor().at(1, 3) == 12.0);

  Value f = flatten_row(v);
  CHECK(f.tensor().dim(0) == 1);
  CHECK(f.tensor().dim(1) == 8);
  CHECK(f.tensor()[5] == 11.0);

  Value r = roll_cols(v, 1);
  CHECK(r.tensor().at(0, 0) == 3.0);
  CHECK(r.tensor().at(0, 1) == 0.0);
  Value rneg = roll_cols(v, -1);
  CHECK(rneg.tensor().at(0, 0) == 1.0);
  CHECK(rneg.tensor().at(0, 3) == 0.0);

  CHECK_THROWS_AS(cols(v, 3, 2), ConfigError);
}

TEST_CASE("global average pool and reductions") {
  Tensor t = Tensor::from({2, 3}, {1, 2, 3, 4, 5, 6});
  Value v = Value::constant(t);
  Value gap = global_avg_pool(v);
  CHECK(gap.tensor()[0] == doctest::Approx(2.0));
  CHECK(gap.tensor()[1] == doctest::Approx(5.0));
  CHECK(sum_all(v).scalar() == doctest::Approx(21.0));
  CHECK(mean_all(v).scalar() == doctest::Approx(3.5));
}

TEST_CASE("cross3 matches the hand formula") {
  Value a = Value::constant(Tensor::from({1, 3}, {1, 0, 0}));
  Value b = Value::constant(Tensor::from({1, 3}, {0, 1, 0}));
  Value c = cross3(a, b);
  CHECK(c.tensor()[0] == 0.0);
  CHECK(c.tensor()[1] == 0.0);
  CHECK(c.tensor()[2] == 1.0);
}

TEST_CASE("shape mismatches are rejected") {
  Value a = Value::constant(Tensor::zeros({2, 3}));
  Value b = Value::constant(Tensor::zeros({3, 2}));
  CHECK_THROWS_AS(add(a, b), ConfigError);
  CHECK_THROWS_AS(matmul(a, a), ConfigError);
  CHECK_THROWS_AS(conv1d_circular(a, Value::constant(Tensor::zeros({2, 2, 4})),
                                  Value::constant(Tensor::zeros({1, 2})), 1),
                  ConfigError);
  CHECK_THROWS_AS(conv1d_circular(a, Value::constant(Tensor::zeros({2, 2, 3})),
                                  Value::constant(Tensor::zeros({1, 2})), 2),
                  ConfigError);
}

TEST_CASE("backward accumulates into reused leaves") {
  // y = x * x: dy/dx = 2x must come out of two accumulations.
  Value x = Value::leaf(Tensor::from({1, 1}, {3.0}), "x");
  Value y = mul(x, x);
  y.backward();
  CHECK(x.grad()[0] == doctest::Approx(6.0));
}

TEST_CASE("gradients flow only where requested") {
  Value c = Value::constant(Tensor::from({1, 2}, {1.0, 2.0}));
  Value x = Value::leaf(Tensor::from({1, 2}, {3.0, 4.0}), "x");
  Value out = sum_all(mul(c, x));
  out.backward();
  CHECK(x.grad()[0] == doctest::Approx(1.0));
  CHECK(x.grad()[1] == doctest::Approx(2.0));
  CHECK(!c.node()->has_grad());
}
