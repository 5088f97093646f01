#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hpfem {

/// Compressed sparse row matrix with sorted, unique column indices per row.
struct CsrMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::size_t> row_ptr{0};
    std::vector<std::size_t> col;
    std::vector<double> val;

    [[nodiscard]] std::size_t nnz() const { return val.size(); }

    /// y = A x
    void multiply(std::span<const double> x, std::span<double> y) const
    {
        for (std::size_t i = 0; i < rows; ++i) {
            double s = 0.0;
            for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
                s += val[k] * x[col[k]];
            y[i] = s;
        }
    }

    [[nodiscard]] double at(std::size_t i, std::size_t j) const
    {
        const auto first = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
        const auto last = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
        auto it = std::lower_bound(first, last, j);
        if (it == last || *it != j)
            return 0.0;
        return val[static_cast<std::size_t>(it - col.begin())];
    }
};

/// Row-wise accumulator; repeated (i, j) insertions are summed on finalize().
class SparseBuilder {
public:
    SparseBuilder(std::size_t rows, std::size_t cols) : cols_(cols), rows_(rows) {}

    void add(std::size_t i, std::size_t j, double v)
    {
        if (i >= rows_.size() || j >= cols_)
            throw std::out_of_range("sparse entry out of range");
        rows_[i].emplace_back(j, v);
    }

    [[nodiscard]] CsrMatrix finalize()
    {
        CsrMatrix m;
        m.rows = rows_.size();
        m.cols = cols_;
        m.row_ptr.assign(m.rows + 1, 0);
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            auto& row = rows_[i];
            std::stable_sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
            for (std::size_t k = 0; k < row.size();) {
                std::size_t j = row[k].first;
                double s = 0.0;
                while (k < row.size() && row[k].first == j)
                    s += row[k++].second;
                m.col.push_back(j);
                m.val.push_back(s);
            }
            m.row_ptr[i + 1] = m.col.size();
            row.clear();
            row.shrink_to_fit();
        }
        return m;
    }

private:
    std::size_t cols_;
    std::vector<std::vector<std::pair<std::size_t, double>>> rows_;
};

} // namespace hpfem
