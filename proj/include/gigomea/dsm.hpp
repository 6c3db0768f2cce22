#pragma once

#include <cstddef>
#include <vector>

namespace gigomea
{

// Symmetric, nonnegative dependency structure matrix with a zero diagonal.
class Dsm
{
  public:
    Dsm() = default;
    explicit Dsm(std::size_t size) : size_(size), values_(size * size, 0.0) {}

    std::size_t size() const noexcept { return size_; }

    double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * size_ + j]; }

    // Writes both (i, j) and (j, i).
    void set(std::size_t i, std::size_t j, double value) noexcept
    {
        values_[i * size_ + j] = value;
        values_[j * size_ + i] = value;
    }

    bool is_symmetric() const noexcept
    {
        for (std::size_t i = 0; i < size_; ++i)
            for (std::size_t j = i + 1; j < size_; ++j)
                if ((*this)(i, j) != (*this)(j, i))
                    return false;
        return true;
    }

  private:
    std::size_t size_ = 0;
    std::vector<double> values_;
};

} // namespace gigomea
