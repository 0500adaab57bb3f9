#include "finslerkit/forms.hpp"

namespace fk {

VectorOneForm::VectorOneForm(std::vector<VectorField> columns) : columns_(std::move(columns)) {
    for (const auto& c : columns_) {
        if (c.size() != static_cast<int>(columns_.size())) throw DomainError("vector 1-form must be square");
    }
}

VectorOneForm VectorOneForm::zero(int n) {
    return VectorOneForm(std::vector<VectorField>(static_cast<std::size_t>(2 * n), VectorField::zero(n)));
}

VectorOneForm VectorOneForm::identity(int n) {
    std::vector<VectorField> columns;
    for (int b = 0; b < 2 * n; ++b) columns.push_back(VectorField::coordinate(n, b));
    return VectorOneForm(std::move(columns));
}

VectorField VectorOneForm::apply(const VectorField& X) const {
    if (X.size() != size()) throw DomainError("vector 1-form applied to a field of another dimension");
    VectorField result = VectorField::zero(dimension());
    for (int b = 0; b < size(); ++b) {
        if (X[b].is_zero()) continue;
        result = result + X[b] * columns_[static_cast<std::size_t>(b)];
    }
    return result;
}

VectorOneForm operator+(const VectorOneForm& K, const VectorOneForm& L) {
    std::vector<VectorField> columns;
    for (int b = 0; b < K.size(); ++b) columns.push_back(K.column(b) + L.column(b));
    return VectorOneForm(std::move(columns));
}

VectorOneForm operator-(const VectorOneForm& K, const VectorOneForm& L) {
    std::vector<VectorField> columns;
    for (int b = 0; b < K.size(); ++b) columns.push_back(K.column(b) - L.column(b));
    return VectorOneForm(std::move(columns));
}

VectorOneForm operator*(double s, const VectorOneForm& L) {
    std::vector<VectorField> columns;
    for (int b = 0; b < L.size(); ++b) columns.push_back(s * L.column(b));
    return VectorOneForm(std::move(columns));
}

VectorOneForm compose(const VectorOneForm& K, const VectorOneForm& L) {
    std::vector<VectorField> columns;
    for (int b = 0; b < L.size(); ++b) columns.push_back(K.apply(L.column(b)));
    return VectorOneForm(std::move(columns));
}

VectorOneForm tensor(const std::vector<ScalarField>& one_form, const VectorField& X) {
    std::vector<VectorField> columns;
    for (const auto& w : one_form) columns.push_back(w * X);
    return VectorOneForm(std::move(columns));
}

VectorTwoForm::VectorTwoForm(int n)
    : n_(n), values_(static_cast<std::size_t>(4 * n * n), VectorField::zero(n)) {}

void VectorTwoForm::set(int a, int b, const VectorField& value) {
    values_[static_cast<std::size_t>(a * 2 * n_ + b)] = value;
    values_[static_cast<std::size_t>(b * 2 * n_ + a)] = -value;
}

VectorField VectorTwoForm::apply(const VectorField& X, const VectorField& Y) const {
    VectorField result = VectorField::zero(n_);
    for (int a = 0; a < 2 * n_; ++a) {
        if (X[a].is_zero()) continue;
        for (int b = 0; b < 2 * n_; ++b) {
            if (a == b || Y[b].is_zero()) continue;
            result = result + (X[a] * Y[b]) * on_coordinates(a, b);
        }
    }
    return result;
}

VectorOneForm tangent_structure(int n) {
    std::vector<VectorField> columns;
    for (int b = 0; b < 2 * n; ++b) {
        columns.push_back(b < n ? VectorField::coordinate(n, n + b) : VectorField::zero(n));
    }
    return VectorOneForm(std::move(columns));
}

VectorOneForm fn_bracket_vf(const VectorOneForm& L, const VectorField& X) {
    const int n = L.dimension();
    std::vector<VectorField> columns;
    for (int b = 0; b < 2 * n; ++b) {
        const VectorField Y = VectorField::coordinate(n, b);
        columns.push_back(lie_bracket(L.column(b), X) - L.apply(lie_bracket(Y, X)));
    }
    return VectorOneForm(std::move(columns));
}

VectorTwoForm fn_bracket_11(const VectorOneForm& K, const VectorOneForm& L) {
    const int n = K.dimension();
    VectorTwoForm result(n);
    // On coordinate fields [X, Y] = 0, so the (KL + LK)[X, Y] term drops.
    for (int a = 0; a < 2 * n; ++a) {
        const VectorField X = VectorField::coordinate(n, a);
        for (int b = a + 1; b < 2 * n; ++b) {
            const VectorField Y = VectorField::coordinate(n, b);
            const VectorField& KX = K.column(a);
            const VectorField& KY = K.column(b);
            const VectorField& LX = L.column(a);
            const VectorField& LY = L.column(b);
            VectorField value = lie_bracket(KX, LY) + lie_bracket(LX, KY) -
                                K.apply(lie_bracket(LX, Y) + lie_bracket(X, LY)) -
                                L.apply(lie_bracket(KX, Y) + lie_bracket(X, KY));
            result.set(a, b, value);
        }
    }
    return result;
}

Eigen::MatrixXd evaluate(EvalContext& ctx, const VectorOneForm& L) {
    Eigen::MatrixXd M(L.size(), L.size());
    for (int b = 0; b < L.size(); ++b) M.col(b) = evaluate(ctx, L.column(b));
    return M;
}

}  // namespace fk
