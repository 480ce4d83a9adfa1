#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "percond/config.hpp"
#include "percond/errors.hpp"

using namespace percond;
namespace fs = std::filesystem;

namespace {

const std::string kDiskConfig = R"({
  "geometry": {"shape": "ellipse", "a": 1.0, "b": 1.0, "N": 128},
  "cell": [1.0, 1.0],
  "materials": {"lambda_plus": 2.0, "lambda_minus": 1.0},
  "boundary_data": {"f": "zero", "g": "zero"},
  "rho_law": {"type": "power", "c": 1.0, "a": 1.0},
  "p": [0.5, 0.5],
  "directions": [1, 2],
  "eps": 0.1,
  "seed": 777
})";

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("percond_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd =
        std::string(PERCOND_CLI_PATH) + " " + args + " >" + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

} // namespace

TEST_CASE("config parsing accepts the documented schema") {
    const RunConfig cfg = parse_config_text(kDiskConfig);
    CHECK(cfg.N == 128);
    CHECK(cfg.lambda_plus == doctest::Approx(2.0));
    CHECK(cfg.eps.has_value());
    CHECK(cfg.center().x == doctest::Approx(0.5));
    CHECK(cfg.directions.size() == 2);
    CHECK(!cfg.fingerprint.empty());

    const Instance inst = make_instance(cfg);
    CHECK(inst.geometry.size() == 128);
    CHECK(inst.cell.measure == doctest::Approx(1.0));
}

TEST_CASE("config parsing rejects unknown keys and bad values") {
    CHECK_THROWS_AS(parse_config_text("{"), config_error);
    CHECK_THROWS_AS(parse_config_text(R"({"cell": [1,1]})"), config_error);

    nlohmann::json doc = nlohmann::json::parse(kDiskConfig);
    doc["surprise"] = 1;
    CHECK_THROWS_AS(parse_config_text(doc.dump()), config_error);

    doc = nlohmann::json::parse(kDiskConfig);
    doc["geometry"]["lobes"] = 3; // star key on an ellipse
    CHECK_THROWS_AS(parse_config_text(doc.dump()), config_error);

    doc = nlohmann::json::parse(kDiskConfig);
    doc["rho_law"] = {{"type", "power"}, {"c", 1.0}, {"a", 2.0}};
    CHECK_THROWS_AS(parse_config_text(doc.dump()), config_error);

    doc = nlohmann::json::parse(kDiskConfig);
    doc["directions"] = {3};
    CHECK_THROWS_AS(parse_config_text(doc.dump()), config_error);
}

TEST_CASE("solve writes results and is deterministic") {
    TempDir tmp;
    write_file(tmp.path / "cfg.json", kDiskConfig);
    const std::string common =
        "--config " + (tmp.path / "cfg.json").string() + " --out " + tmp.path.string();

    CHECK(run_cli("solve " + common, tmp.path / "log1.txt") == 0);
    REQUIRE(fs::exists(tmp.path / "result.json"));
    REQUIRE(fs::exists(tmp.path / "fields.csv"));

    const auto doc = nlohmann::json::parse(read_file(tmp.path / "result.json"));
    CHECK(doc.at("lambda_eff").size() == 2);
    CHECK(doc.at("lambda_eff").at(0).size() == 2);
    CHECK(doc.at("eps").get<double>() == doctest::Approx(0.1));

    const std::string csv1 = read_file(tmp.path / "fields.csv");
    CHECK(csv1.rfind("# percond-schema v1", 0) == 0);
    const std::string res1 = read_file(tmp.path / "result.json");

    // rerun with the same config and seed: byte-identical outputs
    CHECK(run_cli("solve " + common, tmp.path / "log2.txt") == 0);
    CHECK(read_file(tmp.path / "fields.csv") == csv1);
    CHECK(read_file(tmp.path / "result.json") == res1);
}

TEST_CASE("solve rejects an inadmissible eps with exit code 2") {
    TempDir tmp;
    nlohmann::json doc = nlohmann::json::parse(kDiskConfig);
    doc["eps"] = 0.6; // eps0 = 0.5 for the centered unit disk
    write_file(tmp.path / "cfg.json", doc.dump());
    const int rc = run_cli("solve --config " + (tmp.path / "cfg.json").string() + " --out " +
                               tmp.path.string(),
                           tmp.path / "log.txt");
    CHECK(rc == 2);
    const std::string log = read_file(tmp.path / "log.txt");
    CHECK(log.find("inside the cell") != std::string::npos);
}

TEST_CASE("sweep emits tables, fits and orders") {
    TempDir tmp;
    nlohmann::json doc = nlohmann::json::parse(kDiskConfig);
    doc.erase("eps");
    doc["eps_grid"] = {0.2, 0.1414, 0.1, 0.0707, 0.05, 0.0354, 0.025, 0.0177};
    doc["directions"] = {1};
    doc["fit_degree"] = 4;
    write_file(tmp.path / "cfg.json", doc.dump());
    const int rc = run_cli("sweep --config " + (tmp.path / "cfg.json").string() + " --out " +
                               tmp.path.string(),
                           tmp.path / "log.txt");
    CHECK(rc == 0);
    REQUIRE(fs::exists(tmp.path / "sweep.csv"));
    REQUIRE(fs::exists(tmp.path / "fit.json"));
    REQUIRE(fs::exists(tmp.path / "orders.json"));
    REQUIRE(fs::exists(tmp.path / "plot.gp"));

    const std::string csv = read_file(tmp.path / "sweep.csv");
    CHECK(csv.rfind("# percond-schema v1", 0) == 0);
    CHECK(csv.find("eps,eps_prime,k,j,") != std::string::npos);

    const auto orders = nlohmann::json::parse(read_file(tmp.path / "orders.json"));
    const auto entry = orders.at("orders").at(0);
    CHECK(entry.at("slope").get<double>() >= 2.8);
    CHECK(orders.at("errors").empty());

    // fitted constant term agrees with the independently computed limit
    const auto fits = nlohmann::json::parse(read_file(tmp.path / "fit.json"));
    const auto f0 = fits.at("fits").at(0);
    CHECK(std::abs(f0.at("a0_minus_limit").get<double>()) <=
          2.0 * std::max(f0.at("a0_stderr").get<double>(), 1e-10));
}

TEST_CASE("sweep with an empty grid is a config error") {
    TempDir tmp;
    nlohmann::json doc = nlohmann::json::parse(kDiskConfig);
    doc.erase("eps");
    doc["eps_grid"] = nlohmann::json::array();
    write_file(tmp.path / "cfg.json", doc.dump());
    CHECK(run_cli("sweep --config " + (tmp.path / "cfg.json").string() + " --out " +
                      tmp.path.string(),
                  tmp.path / "log.txt") == 2);
}

TEST_CASE("validate passes on the default benchmark and honors the fault hook") {
    TempDir tmp;
    write_file(tmp.path / "cfg.json", kDiskConfig);
    CHECK(run_cli("validate --config " + (tmp.path / "cfg.json").string() + " --out " +
                      tmp.path.string(),
                  tmp.path / "log.txt") == 0);
    const auto rep = nlohmann::json::parse(read_file(tmp.path / "validate.json"));
    CHECK(rep.at("all_pass").get<bool>());

    // perturbing the W diagonal must trip the Gauss-identity check
    nlohmann::json doc = nlohmann::json::parse(kDiskConfig);
    doc["debug"] = {{"perturb_w_diag", 1e-3}};
    write_file(tmp.path / "bad.json", doc.dump());
    CHECK(run_cli("validate --config " + (tmp.path / "bad.json").string() + " --out " +
                      tmp.path.string(),
                  tmp.path / "log2.txt") == 1);
    const auto rep2 = nlohmann::json::parse(read_file(tmp.path / "validate.json"));
    bool gauss_failed = false;
    for (const auto& c : rep2.at("checks"))
        if (c.at("name") == "periodic_gauss_identity" && !c.at("pass").get<bool>())
            gauss_failed = true;
    CHECK(gauss_failed);
}

TEST_CASE("validate passes at coarse N with the documented looser tolerances") {
    TempDir tmp;
    nlohmann::json doc = nlohmann::json::parse(kDiskConfig);
    doc["geometry"]["N"] = 32;
    write_file(tmp.path / "cfg.json", doc.dump());
    CHECK(run_cli("validate --config " + (tmp.path / "cfg.json").string() + " --out " +
                      tmp.path.string(),
                  tmp.path / "log.txt") == 0);
}
