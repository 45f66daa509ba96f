#include "dix/regression_grid.hpp"

#include <algorithm>
#include <mutex>
#include <thread>

#include "dix/errors.hpp"
#include "dix/tsv.hpp"

namespace dix {

namespace {

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

}  // namespace

std::optional<std::string> GridResult::best_predictor() const {
    std::optional<std::string> best;
    std::size_t best_count = 0;
    for (const auto& [name, count] : expectation_tally) {
        if (!best || count > best_count) {
            best = name;
            best_count = count;
        }
    }
    return best;
}

GridResult regression_grid(const AnalysisMatrix& matrix, const std::vector<std::string>& responses,
                           const std::vector<PredictorSet>& predictor_sets, const TagClassification& classes,
                           unsigned worker_count) {
    const Eigen::VectorXd exposure = to_vector(matrix.column("exposure_years"));

    struct Task {
        const PredictorSet* set;
        std::string response;
    };
    std::vector<Task> tasks;
    for (const auto& set : predictor_sets) {
        for (const auto& r : responses) tasks.push_back({&set, r});
    }

    struct ModelOutcome {
        std::vector<GridCell> cells;
        std::vector<int> cell_orientation;
        bool failed = false;
    };
    std::vector<ModelOutcome> outcomes(tasks.size());

    auto run_task = [&](std::size_t t) {
        const Task& task = tasks[t];
        const PredictorSet& set = *task.set;
        ModelOutcome& out = outcomes[t];
        Eigen::VectorXd y = to_vector(matrix.column(std::string("tag_") + task.response));
        try {
            RegressionFit fit = poisson_fit(y, set.columns, exposure, set.names);
            for (std::size_t k = 0; k < set.names.size(); ++k) {
                GridCell cell;
                cell.grid = set.label;
                cell.response = task.response;
                cell.predictor = set.names[k];
                cell.coefficient = fit.coefficient(set.names[k]);
                cell.robust_se = fit.robust_se(static_cast<Eigen::Index>(k + 1));
                cell.t_stat = fit.t_stats(static_cast<Eigen::Index>(k + 1));
                cell.pct_change = fit.pct_change(set.names[k]);
                const int expected = classes.expected_sign(task.response) * set.orientation[k];
                if (expected == 0) {
                    cell.expectation = Expectation::None;
                } else {
                    cell.expectation =
                        sign_of(cell.pct_change) == expected ? Expectation::Matches : Expectation::Violates;
                }
                out.cells.push_back(std::move(cell));
                out.cell_orientation.push_back(set.orientation[k]);
            }
        } catch (const Error& e) {
            out.failed = true;
            for (std::size_t k = 0; k < set.names.size(); ++k) {
                GridCell cell;
                cell.grid = set.label;
                cell.response = task.response;
                cell.predictor = set.names[k];
                cell.error = e.what();
                out.cells.push_back(std::move(cell));
                out.cell_orientation.push_back(set.orientation[k]);
            }
        }
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(worker_count, static_cast<unsigned>(tasks.size())));
    if (workers <= 1) {
        for (std::size_t t = 0; t < tasks.size(); ++t) run_task(t);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t t = w; t < tasks.size(); t += workers) run_task(t);
            });
        }
        for (auto& t : pool) t.join();
    }

    GridResult result;
    result.model_count = tasks.size();
    // Tally rows appear once per oriented predictor, Table-5 style; only
    // classified responses can add to the count.
    std::map<std::string, std::size_t> tally;
    std::vector<std::string> tally_order;
    for (std::size_t t = 0; t < tasks.size(); ++t) {
        if (outcomes[t].failed) ++result.failed_models;
        for (std::size_t c = 0; c < outcomes[t].cells.size(); ++c) {
            GridCell& cell = outcomes[t].cells[c];
            if (outcomes[t].cell_orientation[c] != 0) {
                if (tally.emplace(cell.predictor, 0).second) tally_order.push_back(cell.predictor);
                if (cell.expectation == Expectation::Matches) ++tally[cell.predictor];
            }
            result.cells.push_back(std::move(cell));
        }
    }
    for (const auto& name : tally_order) result.expectation_tally.emplace_back(name, tally[name]);
    return result;
}

PredictorSet factor_predictors(const AnalysisMatrix& matrix, const Eigen::MatrixXd& scores,
                               const std::vector<std::string>& factor_names, const std::vector<int>& orientation) {
    if (static_cast<std::size_t>(scores.cols()) != factor_names.size() || factor_names.size() != orientation.size()) {
        throw ValidationError("factor_predictors: names/orientation must match score columns");
    }
    if (static_cast<std::size_t>(scores.rows()) != matrix.rows()) {
        throw ValidationError("factor_predictors: score rows must match the matrix");
    }
    PredictorSet set;
    set.label = "factor";
    set.names = factor_names;
    set.columns = scores;
    set.orientation = orientation;
    return set;
}

std::vector<PredictorSet> indicator_predictors(const AnalysisMatrix& matrix,
                                               const std::vector<std::string>& indicators) {
    std::vector<PredictorSet> sets;
    for (const auto& name : indicators) {
        PredictorSet set;
        set.label = "indicator";
        set.names = {name};
        const auto& col = matrix.column(name);
        set.columns = Eigen::Map<const Eigen::MatrixXd>(col.data(), static_cast<Eigen::Index>(col.size()), 1);
        // DeIn measures dependence, the inverse reading of disruption.
        set.orientation = {name == "dein" ? -1 : 1};
        sets.push_back(std::move(set));
    }
    return sets;
}

std::string grid_tsv(const GridResult& result) {
    std::string out = "grid\tresponse\tpredictor\tcoefficient\trobust_se\tt\tpercentage_change\texpectation\terror\n";
    auto expectation_token = [](Expectation e) {
        switch (e) {
            case Expectation::Matches: return "matches";
            case Expectation::Violates: return "violates";
            case Expectation::None: return "none";
        }
        return "none";
    };
    for (const auto& cell : result.cells) {
        out += cell.grid;
        out += '\t';
        out += cell.response;
        out += '\t';
        out += cell.predictor;
        if (cell.error.empty()) {
            out += '\t';
            out += format_fixed(cell.coefficient, 4);
            out += '\t';
            out += format_fixed(cell.robust_se, 4);
            out += '\t';
            out += format_fixed(cell.t_stat, 4);
            out += '\t';
            out += format_fixed(cell.pct_change, 4);
            out += '\t';
            out += expectation_token(cell.expectation);
            out += "\t\n";
        } else {
            out += "\tNA\tNA\tNA\tNA\tnone\t";
            out += cell.error;
            out += '\n';
        }
    }
    for (const auto& [name, count] : result.expectation_tally) {
        out += "tally\tmeets_expectations\t";
        out += name;
        out += '\t';
        out += std::to_string(count);
        out += "\t\t\t\t\t\n";
    }
    return out;
}

}  // namespace dix
