#ifndef CONOSCOPE_BUDGET_HPP
#define CONOSCOPE_BUDGET_HPP

#include <atomic>
#include <chrono>
#include <memory>
#include <stdexcept>
#include <string>

namespace cono {

// Raised when a computation exceeds its resource budget. Never a wrong
// answer: callers either finish exactly or see this.
struct BudgetError : std::runtime_error {
    enum class Kind { Cells, Time };
    Kind kind;
    explicit BudgetError(Kind k, const std::string& what)
        : std::runtime_error(what), kind(k) {}
};

class Budget {
public:
    Budget(long max_cells, double max_seconds)
        : max_cells_(max_cells),
          deadline_(std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(max_seconds))),
          use_time_(max_seconds > 0) {}

    void charge_cells(long n = 1) {
        if (max_cells_ > 0 && (cells_ += n) > max_cells_)
            throw BudgetError(BudgetError::Kind::Cells,
                              "budget: cell cap " + std::to_string(max_cells_) + " exceeded");
        check_time();
    }

    void check_time() const {
        if (use_time_ && std::chrono::steady_clock::now() > deadline_)
            throw BudgetError(BudgetError::Kind::Time, "budget: time cap exceeded");
    }

    long cells_used() const { return cells_.load(); }

private:
    long max_cells_;
    std::atomic<long> cells_{0};
    std::chrono::steady_clock::time_point deadline_;
    bool use_time_;
};

struct QeOptions {
    long max_cells = 2000000;
    double max_seconds = 0;  // 0 = unlimited; CLI seeds from CONOSCOPE_BUDGET_SECONDS
    bool parallel = true;
    std::vector<int> var_order;  // optional override for cad_build

    std::shared_ptr<Budget> make_budget() const {
        return std::make_shared<Budget>(max_cells, max_seconds);
    }
};

} // namespace cono

#endif
