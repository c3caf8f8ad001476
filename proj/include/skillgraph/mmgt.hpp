#pragma once

#include "skillgraph/autodiff.hpp"
#include "skillgraph/matrix.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace skillgraph {

using EdgePair = std::pair<std::size_t, std::size_t>;

struct MmgtConfig {
    std::size_t text_dim = 384;  // D
    std::size_t img_dim = 32;    // D_img
    std::size_t model_dim = 64;  // d
    std::size_t layers = 2;      // L
};

// One registered parameter tensor. Vectors (biases, layer-norm affines) are
// stored as 1 x n matrices but carry logical rank 1 in checkpoints.
struct ParamInfo {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t fan_in = 0;  // 0 for tensors that are not weight matrices
    bool ln_gain = false;    // initialized to 1 instead of 0
    bool vector = false;     // logical rank 1
};

std::vector<ParamInfo> build_param_registry(const MmgtConfig& cfg);

// All trainable tensors of the topology predictor, in a stable canonical
// order (the registry order). Flattening, hashing and the optimizer state
// all rely on that ordering.
class MmgtParams {
public:
    static MmgtParams init(const MmgtConfig& cfg, std::uint64_t seed);
    // Weights and biases zero, layer norms identity. Test fixture.
    static MmgtParams zeroed(const MmgtConfig& cfg);

    const MmgtConfig& config() const { return cfg_; }
    const std::vector<ParamInfo>& registry() const { return registry_; }
    std::size_t tensor_count() const { return tensors_.size(); }
    const Matrix& tensor(std::size_t i) const { return tensors_[i]; }
    const Matrix& tensor(const std::string& name) const;
    Matrix& mutable_tensor(const std::string& name);  // bumps revision
    std::size_t index_of(const std::string& name) const;

    std::uint64_t revision() const { return revision_; }

    std::size_t flat_size() const;
    std::vector<double> flatten() const;
    void assign_flat(const std::vector<double>& flat);  // bumps revision

    // FNV-1a over the little-endian bytes of every tensor in canonical order.
    std::uint64_t content_hash() const;

    void save(const std::string& path) const;
    static MmgtParams load(const std::string& path);

private:
    MmgtParams() = default;
    MmgtConfig cfg_;
    std::vector<ParamInfo> registry_;
    std::vector<Matrix> tensors_;
    std::uint64_t revision_ = 0;
};

// Gradients aligned with MmgtParams' registry order.
struct MmgtGradients {
    std::vector<Matrix> tensors;

    std::vector<double> flatten() const;
    void accumulate(const MmgtGradients& other);
    void scale(double s);
    static MmgtGradients zeros_like(const MmgtParams& params);
};

// Additive attention bias from the role-permitted pair set: 0 on permitted
// pairs, -1e4 elsewhere. Large negative rather than -inf so the model can
// still override the prior when the evidence is strong.
Matrix role_bias(const std::vector<EdgePair>& role_pairs, std::size_t n_agents);

// Recorded forward pass: the tape plus the activations named by the model
// stages. backward() uses the tape; tests read the activations.
struct ForwardTrace {
    std::shared_ptr<Tape> tape;
    std::vector<Tape::Id> param_ids;

    Tape::Id query_vector_id = -1;           // v after Eq-2 style encoding
    std::vector<Tape::Id> relay_ids;         // v^(l) after each relay layer
    Tape::Id h0_id = -1;                     // projected node features
    Tape::Id gates_id = -1;                  // sigmoid gates
    Tape::Id gated_queries_id = -1;          // h0 + g * v
    Tape::Id h1_id = -1;                     // after selective image attention
    std::vector<Tape::Id> h_layer_ids;       // after each GTL+GRNL round
    Tape::Id e_raw_id = -1;
    Tape::Id e_norm_id = -1;

    std::size_t n_agents = 0;
    std::uint64_t params_revision = 0;
    std::vector<EdgePair> candidate_pairs;   // pairs eligible for gradient

    const Matrix& query_vector() const { return tape->value(query_vector_id); }
    const Matrix& h0() const { return tape->value(h0_id); }
    const Matrix& h1() const { return tape->value(h1_id); }
    const Matrix& gates() const { return tape->value(gates_id); }
    const Matrix& gated_queries() const { return tape->value(gated_queries_id); }
    const Matrix& edge_logits_raw() const { return tape->value(e_raw_id); }
    const Matrix& edge_logits() const { return tape->value(e_norm_id); }
};

// Incremental builder for the forward graph. The staged methods mirror the
// encoder pipeline so each stage can be exercised (and gradient-checked) in
// isolation; forward() composes them in order.
class MmgtGraph {
public:
    explicit MmgtGraph(const MmgtParams& params);

    Tape& tape() { return *tape_; }
    std::shared_ptr<Tape> tape_ptr() { return tape_; }
    const std::vector<Tape::Id>& param_ids() const { return param_ids_; }

    Tape::Id input(Matrix value) { return tape_->leaf(std::move(value)); }

    // Q_img rows projected into the model dimension (shared by the query
    // encoder and the per-agent image attention).
    Tape::Id project_patches(Tape::Id q_img);
    // v = LayerNorm(CrossAttn(W_t q, patches) + W_t q)
    Tape::Id encode_query(Tape::Id q_text, Tape::Id patch_tokens);
    // h_i = GELU(LayerNorm(W_node x_i))
    Tape::Id project_nodes(Tape::Id x_agent);

    struct ImageAttention {
        Tape::Id gates;
        Tape::Id gated_queries;
        Tape::Id h1;
    };
    ImageAttention selective_image_attention(Tape::Id h0, Tape::Id v, Tape::Id patch_tokens);

    Tape::Id gtl_layer(Tape::Id h, const Matrix& bias, std::size_t layer);

    struct RelayExchange {
        Tape::Id v_new;
        Tape::Id h_new;
    };
    RelayExchange grnl_layer(Tape::Id v_prev, Tape::Id h, std::size_t layer);

    struct EdgeLogits {
        Tape::Id raw;
        Tape::Id normalized;
    };
    EdgeLogits edge_logits(Tape::Id h_final);

private:
    Tape::Id param(const std::string& name) const;
    // Single-head scaled dot-product cross-attention with its own
    // query/key/value/output projections, named by prefix.
    Tape::Id cross_attention(Tape::Id x, Tape::Id y, const std::string& prefix);
    // Parameter-free scaled dot-product attention: keys double as values.
    Tape::Id dot_attention(Tape::Id x, Tape::Id y);
    Tape::Id layer_norm(Tape::Id x, const std::string& prefix);

    const MmgtParams* params_;
    std::shared_ptr<Tape> tape_;
    std::vector<Tape::Id> param_ids_;
    double inv_sqrt_d_ = 0.0;
};

// Full five-stage forward pass. role_pairs feeds the attention bias;
// candidate_pairs marks which edge logits may carry gradient.
ForwardTrace mmgt_forward(const MmgtParams& params, const std::vector<double>& q_text_embedding,
                          const Matrix& q_img, const Matrix& x_agent,
                          const std::vector<EdgePair>& role_pairs,
                          const std::vector<EdgePair>& candidate_pairs);

// Exact reverse-mode gradients of a scalar loss whose gradient on the
// normalized edge logits is `upstream`. Entries outside the candidate set
// (including the diagonal) are masked to zero before backpropagation.
MmgtGradients mmgt_backward(const ForwardTrace& trace, const Matrix& upstream, const MmgtParams& params);

} // namespace skillgraph
