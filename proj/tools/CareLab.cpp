#include "care/Acr.h"
#include "care/BayesNet.h"
#include "care/Dataset.h"
#include "care/Fci.h"
#include "care/Harness.h"
#include "care/Model.h"
#include "care/SynthGen.h"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

namespace {

void writeFile(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

std::unique_ptr<care::CiTester> makeTester(const std::string& kind,
                                           const care::Dataset& data, uint64_t seed) {
    using namespace care;
    if (kind == "fisher_z") {
        Eigen::MatrixXd mat(static_cast<Eigen::Index>(data.rowCount()),
                            static_cast<Eigen::Index>(data.columnCount()));
        for (size_t r = 0; r < data.rowCount(); ++r)
            for (size_t c = 0; c < data.columnCount(); ++c)
                mat(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    data.rows[r][c];
        return std::make_unique<FisherZTester>(std::move(mat));
    }
    if (kind == "g_squared") return std::make_unique<GSquaredTester>(data);
    if (kind == "auto")
        return std::make_unique<AutoTester>(data, PermutationTestConfig{100, 10, seed});
    throw std::runtime_error("unknown tester: " + kind);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive causal-regularization lab"};
    app.require_subcommand(1);

    // gen-data
    auto* genCmd = app.add_subcommand("gen-data", "Generate the synthetic dataset");
    size_t genN = 1000;
    std::string genMode = "train";
    uint64_t genSeed = 1;
    std::string genOut = "data.csv";
    genCmd->add_option("--n", genN, "Number of rows");
    genCmd->add_option("--mode", genMode, "train or test")
        ->check(CLI::IsMember({"train", "test"}));
    genCmd->add_option("--seed", genSeed, "RNG seed");
    genCmd->add_option("--out", genOut, "Output CSV path");

    // sample-bn
    auto* bnCmd = app.add_subcommand("sample-bn", "Sample a BIF Bayesian network");
    std::string bnBif;
    size_t bnN = 100;
    uint64_t bnSeed = 1;
    std::string bnTarget, bnOut = "bn.csv";
    std::vector<std::string> bnPositive;
    bnCmd->add_option("--bif", bnBif, "BIF file")->required();
    bnCmd->add_option("--n", bnN, "Number of rows");
    bnCmd->add_option("--seed", bnSeed, "RNG seed");
    bnCmd->add_option("--target", bnTarget, "Variable to binarize into the target");
    bnCmd->add_option("--positive", bnPositive, "Levels mapping to class 1");
    bnCmd->add_option("--out", bnOut, "Output CSV path");

    // fci
    auto* fciCmd = app.add_subcommand("fci", "Learn a PAG and causal mask from a CSV");
    std::string fciIn, fciTarget, fciTester = "auto", fciOut = "pag.json";
    double fciAlpha = 0.1;
    uint64_t fciSeed = 1;
    fciCmd->add_option("--in", fciIn, "Input CSV")->required();
    fciCmd->add_option("--target", fciTarget, "Target column")->required();
    fciCmd->add_option("--alpha", fciAlpha, "Significance level");
    fciCmd->add_option("--tester", fciTester, "fisher_z, g_squared or auto")
        ->check(CLI::IsMember({"fisher_z", "g_squared", "auto"}));
    fciCmd->add_option("--seed", fciSeed, "Seed for the permutation tester");
    fciCmd->add_option("--out", fciOut, "PAG output path; mask goes next to it");

    // train
    auto* trainCmd = app.add_subcommand("train", "Train a model with the penalty");
    std::string trIn, trTarget, trMask, trModel = "mlp", trOut = "model.json";
    double trLambda = 0.0;
    uint64_t trSeed = 1;
    trainCmd->add_option("--in", trIn, "Training CSV")->required();
    trainCmd->add_option("--target", trTarget, "Target column")->required();
    trainCmd->add_option("--mask", trMask, "mask.json from the fci step")->required();
    trainCmd->add_option("--lambda", trLambda, "Penalty strength");
    trainCmd->add_option("--model", trModel, "lr or mlp")
        ->check(CLI::IsMember({"lr", "mlp"}));
    trainCmd->add_option("--seed", trSeed, "Init seed");
    trainCmd->add_option("--out", trOut, "Model output path");

    // experiment
    auto* expCmd = app.add_subcommand("experiment", "Run a named experiment");
    std::string expName, expBif, expOut = "results";
    std::vector<uint64_t> expSeeds;
    std::vector<double> expGrid;
    expCmd->add_option("name", expName,
                       "synthetic_generalization, lambda_sweep, sample_size_sweep, "
                       "alarm_scenarios or custom_csv")
        ->required();
    expCmd->add_option("--seeds", expSeeds, "Seed list")->delimiter(',');
    expCmd->add_option("--lambda-grid", expGrid, "Lambda grid")->delimiter(',');
    expCmd->add_option("--bif", expBif, "BIF path for alarm_scenarios");
    expCmd->add_option("--out", expOut, "Output directory");
    std::string expCsv, expTarget;
    double expLambda = 1e-2;
    int expFolds = 5;
    expCmd->add_option("--in", expCsv, "CSV path for custom_csv");
    expCmd->add_option("--target", expTarget, "Target column for custom_csv");
    expCmd->add_option("--lambda", expLambda, "Penalty strength for custom_csv");
    expCmd->add_option("--folds", expFolds, "Fold count for custom_csv");

    CLI11_PARSE(app, argc, argv);

    try {
        using namespace care;
        if (*genCmd) {
            SynthConfig cfg;
            cfg.n = genN;
            cfg.mode = genMode == "test" ? DataMode::Test : DataMode::Train;
            cfg.seed = genSeed;
            writeCsv(generateSynthetic(cfg), genOut);
            std::cout << "wrote " << genOut << "\n";
        } else if (*bnCmd) {
            BayesNet net = parseBifFile(bnBif);
            Dataset data = ancestralSample(net, bnN, bnSeed);
            if (!bnTarget.empty()) {
                if (bnPositive.empty())
                    throw std::runtime_error("--target requires --positive levels");
                data = binarizeTarget(
                    data, bnTarget,
                    std::set<std::string>(bnPositive.begin(), bnPositive.end()));
            }
            writeCsv(data, bnOut);
            std::cout << "wrote " << bnOut << "\n";
        } else if (*fciCmd) {
            Dataset data = loadCsvAutoSchema(fciIn, fciTarget);
            auto tester = makeTester(fciTester, data, fciSeed);
            FciOptions opts;
            opts.alpha = fciAlpha;
            Pag pag = runFci(*tester, data.names, opts);
            CausalMask mask = extractMask(pag, fciTarget);
            writeFile(fciOut, pagToJson(pag));
            std::filesystem::path maskPath =
                std::filesystem::path(fciOut).parent_path() / "mask.json";
            writeFile(maskPath.string(), maskToJson(mask));
            std::cout << "wrote " << fciOut << " and " << maskPath.string() << "\n";
        } else if (*trainCmd) {
            Dataset data = loadCsvAutoSchema(trIn, trTarget);
            std::ifstream maskIn(trMask);
            if (!maskIn) throw std::runtime_error("cannot read " + trMask);
            std::string maskText((std::istreambuf_iterator<char>(maskIn)),
                                 std::istreambuf_iterator<char>());
            CausalMask mask = maskFromJson(maskText);
            AcrConfig cfg;
            cfg.lambda = trLambda;
            cfg.spec.kind =
                trModel == "lr" ? ModelKind::LogisticRegression : ModelKind::Mlp;
            cfg.spec.seed = trSeed;
            cfg.train.seed = trSeed;
            cfg.train.learningRate = 1e-2;
            FittedPipeline fit = fitAcr(data, mask, cfg);
            writeFile(trOut, trainedModelToJson(fit.model));
            std::cout << "wrote " << trOut << "\n";
        } else if (*expCmd) {
            if (expName == "custom_csv") {
                if (expCsv.empty() || expTarget.empty())
                    throw std::runtime_error("custom_csv needs --in and --target");
                auto doc = runCustomCsv(expCsv, expTarget, expLambda, expFolds);
                std::filesystem::create_directories(expOut);
                writeFile((std::filesystem::path(expOut) / "results.json").string(),
                          doc.dump(2) + "\n");
            } else {
                ExperimentConfig cfg;
                if (!expSeeds.empty()) cfg.seeds = expSeeds;
                if (!expGrid.empty()) cfg.lambdaGrid = expGrid;
                cfg.bifPath = expBif;
                runExperiment(expName, cfg, expOut);
            }
            std::cout << "wrote " << expOut << "/results.json\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
