#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace tgflock {

/// Row-major dense real matrix. Rows of a state matrix are agents, columns
/// are coordinates.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

    [[nodiscard]] static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows);
    [[nodiscard]] static DenseMatrix column(std::span<const double> values);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    [[nodiscard]] std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
        return {data_.data() + i * cols_, cols_};
    }

    [[nodiscard]] std::span<double> data() noexcept { return data_; }
    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }

    [[nodiscard]] std::vector<double> column_values(std::size_t j) const;
    [[nodiscard]] std::vector<std::vector<double>> to_rows() const;

    [[nodiscard]] bool is_square() const noexcept { return rows_ == cols_; }
    /// max |m_ij - m_ji|; requires a square matrix.
    [[nodiscard]] double asymmetry() const;
    [[nodiscard]] bool all_finite() const noexcept;

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

[[nodiscard]] DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace tgflock
