#include <iostream>

#include <CLI11.hpp>

#include "fisvdd/cli.hpp"

int main(int argc, char** argv) {
    using namespace fisvdd::cli;

    CLI::App app{"Incremental one-class boundary learning with the Gaussian kernel"};
    app.require_subcommand(1);

    TrainOptions train;
    CLI::App* train_cmd = app.add_subcommand(
        "train", "Train a model incrementally from a numeric CSV stream");
    train_cmd->add_option("input", train.input_path, "Training CSV")->required();
    train_cmd->add_option("--sigma", train.sigma, "Gaussian kernel bandwidth")
        ->required();
    train_cmd->add_option("--burn-in", train.burn_in,
                          "Rows used to build the initial model (default 10)");
    train_cmd->add_option("--max-sv", train.max_sv,
                          "Support-vector cap (default 1024)");
    train_cmd->add_option("--eps-far", train.eps_far,
                          "Far-outlier similarity filter (default 1e-6)");
    train_cmd->add_option("--eps-near", train.eps_near,
                          "Near-duplicate similarity filter (default 1e-9)");
    train_cmd->add_option("--refresh-every", train.refresh_every,
                          "Rebuild the inverse every N absorbed points (0 = off)");
    train_cmd->add_option("--out", train.model_path, "Where to write the model")
        ->required();

    ScoreOptions score;
    CLI::App* score_cmd =
        app.add_subcommand("score", "Score CSV rows against a saved model");
    score_cmd->add_option("model", score.model_path, "Model file")->required();
    score_cmd->add_option("input", score.input_path, "CSV to score")->required();
    score_cmd->add_option("--out", score.output_path,
                          "Output CSV (default: stdout)");
    score_cmd->add_flag("--labeled", score.labeled,
                        "Treat the last column as a label and ignore it");

    EvalOptions eval;
    CLI::App* eval_cmd = app.add_subcommand(
        "eval", "Evaluate a model on a labeled CSV (last column 0/1)");
    eval_cmd->add_option("model", eval.model_path, "Model file")->required();
    eval_cmd->add_option("input", eval.input_path, "Labeled CSV")->required();

    InspectOptions inspect;
    CLI::App* inspect_cmd =
        app.add_subcommand("inspect", "Print model metadata");
    inspect_cmd->add_option("model", inspect.model_path, "Model file")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (train_cmd->parsed()) {
        return cmd_train(train, std::cout, std::cerr);
    }
    if (score_cmd->parsed()) {
        return cmd_score(score, std::cout, std::cerr);
    }
    if (eval_cmd->parsed()) {
        return cmd_eval(eval, std::cout, std::cerr);
    }
    return cmd_inspect(inspect, std::cout, std::cerr);
}
