#include "common/error.hpp"
#include "common/rng.hpp"
#include "tensor/checkpoint.hpp"
#include "tensor/gradcheck.hpp"
#include "tensor/tape.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

using namespace seqdiag;
using namespace seqdiag::nn;

namespace {

Tensor random_tensor(Rng& rng, int64_t rows, int64_t cols, double scale = 1.0) {
    Tensor t = Tensor::zeros(rows, cols);
    for (double& v : t.values()) v = scale * rng.gaussian();
    return t;
}

// Sum of all entries as a scalar; a generic reduction head for checks.
Tensor sum_all(Tape& tape, const Tensor& x) {
    Tensor ones_col = Tensor::full(x.cols(), 1, 1.0);
    Tensor row_sums = tape.matmul(x, ones_col); // (m,1)
    Tensor ones_row = Tensor::full(1, x.rows(), 1.0);
    return tape.matmul(ones_row, row_sums); // (1,1)
}

// Weighted sum against fixed coefficients so gradients are non-uniform.
Tensor weighted_sum(Tape& tape, const Tensor& x, Rng& rng) {
    Tensor w = random_tensor(rng, x.cols(), 1);
    Tensor ones_row = Tensor::full(1, x.rows(), 1.0);
    return tape.matmul(ones_row, tape.matmul(x, w));
}

} // namespace

TEST_CASE("softmax of uniform logits over 9 classes gives 1/9 and ln 9 loss") {
    Tape tape;
    Tensor logits = Tensor::zeros(1, 9);
    Tensor probs = tape.softmax_rows(logits);
    for (double p : probs.values()) CHECK(p == doctest::Approx(1.0 / 9.0));
    Tensor loss = tape.cross_entropy(logits, 4);
    CHECK(loss.item() == doctest::Approx(std::log(9.0)).epsilon(1e-12));
}

TEST_CASE("softmax rows sum to one within 1e-12") {
    Rng rng(8);
    Tape tape;
    Tensor x = random_tensor(rng, 5, 7, 3.0);
    Tensor p = tape.softmax_rows(x);
    for (int64_t i = 0; i < p.rows(); ++i) {
        double sum = 0.0;
        for (int64_t j = 0; j < p.cols(); ++j) sum += p.at(i, j);
        CHECK(std::fabs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("cross_entropy gradient equals softmax minus one-hot") {
    Rng rng(4);
    Tensor logits = random_tensor(rng, 1, 6);
    Tape tape;
    Tensor loss = tape.cross_entropy(logits, 2);
    tape.backward(loss);

    Tensor probs_ref = Tensor::zeros(1, 6);
    {
        Tape t2;
        probs_ref = t2.softmax_rows(logits);
    }
    for (int64_t j = 0; j < 6; ++j) {
        double expected = probs_ref.at(0, j) - (j == 2 ? 1.0 : 0.0);
        CHECK(logits.grad()[static_cast<size_t>(j)] ==
              doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("weighted cross_entropy scales the loss by the target's weight") {
    Rng rng(5);
    Tensor logits = random_tensor(rng, 1, 9);
    Tensor weights = Tensor::full(1, 9, 1.0);
    weights.values()[3] = 2.0;

    Tape tape;
    double unweighted = tape.cross_entropy(logits, 3).item();
    double weighted = tape.cross_entropy(logits, 3, weights).item();
    CHECK(weighted == doctest::Approx(2.0 * unweighted).epsilon(1e-12));
    // Other targets are unaffected.
    CHECK(tape.cross_entropy(logits, 1, weights).item() ==
          doctest::Approx(tape.cross_entropy(logits, 1).item()).epsilon(1e-12));
}

TEST_CASE("layer_norm maps a constant row to the shift vector") {
    Tape tape;
    Tensor x = Tensor::full(1, 8, 3.75);
    Tensor gamma = Tensor::full(1, 8, 1.0);
    Tensor beta = Tensor::zeros(1, 8);
    Tensor y = tape.layer_norm(x, gamma, beta);
    for (double v : y.values()) CHECK(std::fabs(v) < 1e-12);
}

TEST_CASE("grad_check validates the quadratic f(x) = sum x^2 at (1,2,3)") {
    Tensor x = Tensor::from(1, 3, {1.0, 2.0, 3.0});
    auto f = [&x](Tape& tape) { return sum_all(tape, tape.mul(x, x)); };
    CHECK(grad_check(f, {x}) < 1e-8);

    // The analytic gradient the checker compared against is exactly 2x.
    x.zero_grad();
    Tape tape;
    tape.backward(f(tape));
    CHECK(x.grad()[0] == doctest::Approx(2.0));
    CHECK(x.grad()[1] == doctest::Approx(4.0));
    CHECK(x.grad()[2] == doctest::Approx(6.0));
}

TEST_CASE("every primitive's backward matches central differences") {
    Rng rng(2025);

    SUBCASE("matmul") {
        Tensor a = random_tensor(rng, 3, 4);
        Tensor b = random_tensor(rng, 4, 2);
        auto f = [&](Tape& tape) { return sum_all(tape, tape.matmul(a, b)); };
        CHECK(grad_check(f, {a, b}) < 1e-5);
    }
    SUBCASE("add and add_bias") {
        Tensor a = random_tensor(rng, 3, 4);
        Tensor b = random_tensor(rng, 3, 4);
        Tensor bias = random_tensor(rng, 1, 4);
        auto f = [&](Tape& tape) {
            return sum_all(tape, tape.add_bias(tape.add(a, b), bias));
        };
        CHECK(grad_check(f, {a, b, bias}) < 1e-5);
    }
    SUBCASE("scale, concat, slices") {
        Tensor a = random_tensor(rng, 2, 3);
        Tensor b = random_tensor(rng, 2, 2);
        Rng wrng(31);
        auto f = [&](Tape& tape) {
            Tensor joined = tape.concat_cols(tape.scale(a, -1.7), b);
            Tensor sliced = tape.slice_cols(tape.slice_rows(joined, 0, 2), 1, 5);
            Rng local = wrng;
            return weighted_sum(tape, sliced, local);
        };
        CHECK(grad_check(f, {a, b}) < 1e-5);
    }
    SUBCASE("mean_rows") {
        Tensor a = random_tensor(rng, 5, 3);
        Rng wrng(32);
        auto f = [&](Tape& tape) {
            Rng local = wrng;
            return weighted_sum(tape, tape.mean_rows(a), local);
        };
        CHECK(grad_check(f, {a}) < 1e-5);
    }
    SUBCASE("layer_norm") {
        Tensor x = random_tensor(rng, 4, 6);
        Tensor gamma = random_tensor(rng, 1, 6, 0.5);
        Tensor beta = random_tensor(rng, 1, 6, 0.5);
        Rng wrng(33);
        auto f = [&](Tape& tape) {
            Rng local = wrng;
            return weighted_sum(tape, tape.layer_norm(x, gamma, beta), local);
        };
        CHECK(grad_check(f, {x, gamma, beta}) < 1e-5);
    }
    SUBCASE("gelu") {
        Tensor x = random_tensor(rng, 3, 5);
        Rng wrng(34);
        auto f = [&](Tape& tape) {
            Rng local = wrng;
            return weighted_sum(tape, tape.gelu(x), local);
        };
        CHECK(grad_check(f, {x}) < 1e-5);
    }
    SUBCASE("softmax") {
        Tensor x = random_tensor(rng, 3, 5);
        Rng wrng(35);
        auto f = [&](Tape& tape) {
            Rng local = wrng;
            return weighted_sum(tape, tape.softmax_rows(x), local);
        };
        CHECK(grad_check(f, {x}) < 1e-5);
    }
    SUBCASE("scaled_dot_attention") {
        Tensor q = random_tensor(rng, 4, 3);
        Tensor k = random_tensor(rng, 4, 3);
        Tensor v = random_tensor(rng, 4, 2);
        Rng wrng(36);
        auto f = [&](Tape& tape) {
            Rng local = wrng;
            return weighted_sum(tape, tape.scaled_dot_attention(q, k, v), local);
        };
        CHECK(grad_check(f, {q, k, v}) < 1e-5);
    }
    SUBCASE("causal attention") {
        Tensor q = random_tensor(rng, 4, 3);
        Tensor k = random_tensor(rng, 4, 3);
        Tensor v = random_tensor(rng, 4, 2);
        Rng wrng(37);
        auto f = [&](Tape& tape) {
            Rng local = wrng;
            return weighted_sum(tape, tape.scaled_dot_attention(q, k, v, true), local);
        };
        CHECK(grad_check(f, {q, k, v}) < 1e-5);
    }
    SUBCASE("cross_entropy with class weights") {
        Tensor logits = random_tensor(rng, 1, 9);
        Tensor weights = Tensor::full(1, 9, 1.0);
        weights.values()[2] = 2.5;
        auto f = [&](Tape& tape) { return tape.cross_entropy(logits, 2, weights); };
        CHECK(grad_check(f, {logits}) < 1e-5);
    }
}

TEST_CASE("backward is additive across composed losses") {
    Rng rng(88);
    Tensor x = random_tensor(rng, 2, 3);

    auto grad_of = [&x](auto&& fn) {
        x.zero_grad();
        Tape tape;
        tape.backward(fn(tape));
        return x.grad();
    };
    auto f = [&x](Tape& tape) { return sum_all(tape, tape.gelu(x)); };
    auto g = [&x](Tape& tape) { return sum_all(tape, tape.softmax_rows(x)); };
    auto fg = [&](Tape& tape) { return tape.add(f(tape), g(tape)); };

    std::vector<double> gf = grad_of(f);
    std::vector<double> gg = grad_of(g);
    std::vector<double> gfg = grad_of(fg);
    for (size_t i = 0; i < gfg.size(); ++i)
        CHECK(gfg[i] == doctest::Approx(gf[i] + gg[i]).epsilon(1e-10));
}

TEST_CASE("shape mismatches carry both shapes in the message") {
    Tensor a = Tensor::zeros(2, 3);
    Tensor b = Tensor::zeros(2, 3);
    Tape tape;
    try {
        tape.matmul(a, b);
        FAIL("expected ShapeMismatch");
    } catch (const Error& e) {
        CHECK(e.status() == Status::ShapeMismatch);
        CHECK(std::string(e.what()).find("(2,3)") != std::string::npos);
    }
}

TEST_CASE("checkpoint container round trips tensors and manifest") {
    Rng rng(666);
    std::vector<std::pair<std::string, Tensor>> tensors;
    tensors.emplace_back("alpha", random_tensor(rng, 3, 4));
    tensors.emplace_back("beta.bias", random_tensor(rng, 1, 7));
    const std::string manifest = R"({"d_model": 8, "note": "tiny"})";

    std::string path =
        (std::filesystem::temp_directory_path() / "seqdiag_ckpt_test.bin").string();
    save_checkpoint(path, manifest, tensors);
    Checkpoint loaded = load_checkpoint(path);

    CHECK(loaded.manifest_json == manifest);
    REQUIRE(loaded.tensors.size() == 2);
    CHECK(loaded.tensors[0].first == "alpha");
    CHECK(loaded.tensors[0].second.values() == tensors[0].second.values());
    CHECK(loaded.tensors[1].second.values() == tensors[1].second.values());
    std::filesystem::remove(path);
}

TEST_CASE("truncated checkpoints fail with DecodeError") {
    Rng rng(7);
    std::vector<std::pair<std::string, Tensor>> tensors;
    tensors.emplace_back("w", random_tensor(rng, 4, 4));
    std::string path =
        (std::filesystem::temp_directory_path() / "seqdiag_ckpt_trunc.bin").string();
    save_checkpoint(path, "{}", tensors);

    auto size = std::filesystem::file_size(path);
    std::filesystem::resize_file(path, size - 16);
    CHECK_THROWS_AS(load_checkpoint(path), Error);
    std::filesystem::remove(path);
}
