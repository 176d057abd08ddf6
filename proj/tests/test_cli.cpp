#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ihs/atoms.hpp"
#include "ihs/cli.hpp"

using namespace ihs;
using Json = nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
    Json json() const { return Json::parse(out); }
};

Result run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path scratch()
{
    const auto dir = std::filesystem::temp_directory_path() / "ihs_cli_test";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string write(const std::string& name, const std::string& text)
{
    const auto path = scratch() / name;
    std::ofstream(path) << text;
    return path.string();
}

std::string slurp(const std::filesystem::path& path)
{
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("verify")
{
    const auto k = run({"verify", "--model", "kovalevskaya", "--g", "0.5"});
    CHECK(k.code == 0);
    const auto j = k.json();
    CHECK(j["pass"] == true);
    CHECK(j["config"]["seed"] == 0);
    CHECK(j["config"]["samples"] == 1000);
    CHECK(j["config"]["tol"] == 1e-8);

    CHECK(run({"verify", "--model", "canonical:0,1,1,0"}).code == 0);

    const std::string bad = write("noncommuting.json", R"({"name": "bad", "coordinates": ["x", "y"],
        "poisson": "canonical", "momentum": [{"name": "f1", "expr": "x"}, {"name": "f2", "expr": "y"}]})");
    const auto r = run({"verify", "--model", bad});
    CHECK(r.code == 1);
    const auto jb = r.json();
    CHECK(jb["pass"] == false);
    CHECK(jb["commutation"]["worst_pair"] == Json::array({"f1", "f2"}));
}

TEST_CASE("classify")
{
    const auto k = run({"classify", "--model", "kovalevskaya", "--g", "0.5", "--point", "R1=1,S1=0.5"});
    CHECK(k.code == 0);
    const auto j = k.json();
    CHECK(j["classification"]["type"]["triple"] == "(0,2,0)");
    CHECK(j["classification"]["verdict"] == "nondegenerate");

    // Values may use the model's parameters.
    const auto kg = run({"classify", "--model", "kovalevskaya", "--g", "0.5", "--point", "R1=-1,S1=-g"});
    CHECK(kg.json()["classification"]["type"]["triple"] == "(2,0,0)");

    const auto f = run({"classify", "--model", "canonical:0,0,0,1", "--point", "x1=0"});
    CHECK(f.json()["classification"]["type"]["triple"] == "(0,0,1)");

    const auto reg = run({"classify", "--model", "canonical:0,1,1,0", "--point", "x1=1,y1=0.5,x2=0.2,y2=0.3"});
    CHECK(reg.code == 0);
    CHECK(reg.json()["summary"] == "regular, rank 2");

    CHECK(run({"classify", "--model", "kovalevskaya", "--point", "Z=1"}).code == 1);
    CHECK(run({"classify", "--model", "kovalevskaya", "--g", "0.5", "--point", "R1=1,S1=0.2"}).code == 1);
    CHECK(run({"classify", "--model", "kovalevskaya"}).code == 2);
}

TEST_CASE("atoms check")
{
    const std::string bc = write("bc2.json", serialize_product([] {
        for (const auto& n : named_products())
            if (n.product.name == "(B x C2)/Z2") return n.product;
        return AlmostDirectProduct{};
    }()));
    const auto r = run({"atoms", "check", "--product", bc});
    CHECK(r.code == 0);
    const auto j = r.json();
    CHECK(j["complexity"] == 1);
    CHECK(j["iv"] == true);
    CHECK(j["vi"] == true);
    CHECK(j["verdict"] == "stable-analytic-strong-sense");

    const std::string c2 = write("c2.json", serialize_product(c2_trivial()));
    const auto jc = run({"atoms", "check", "--product", c2}).json();
    CHECK(jc["complexity"] == 2);
    CHECK(jc["iv"] == false);
    CHECK(jc["vi"] == false);
    CHECK(jc["verdict"] == "criterion-not-satisfied");

    const std::string nonfree = write("nonfree.json", R"({"name": "nf", "components": ["C2", "B"], "group": "Z2",
        "actions": [{"perms": {"e": [0, 1], "a": [0, 1]}}, {"perms": {"e": [0], "a": [0]}}]})");
    const auto nf = run({"atoms", "check", "--product", nonfree});
    CHECK(nf.code == 1);
    CHECK(nf.err.find("not free") != std::string::npos);
    CHECK(nf.json()["free"] == false);

    const auto ex = run({"atoms", "exceptions"});
    CHECK(ex.code == 0);
    CHECK(ex.out.find("K3") != std::string::npos);
    CHECK(run({"atoms"}).code == 2);
}

TEST_CASE("trace")
{
    const auto path = scratch() / "line.svg";
    const auto r = run({"trace", "--model", "canonical:1,0,1,0", "--out", path.string()});
    CHECK(r.code == 0);
    const std::string svg = slurp(path);
    std::size_t polylines = 0;
    for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++polylines;
    CHECK(polylines == 1);
    CHECK(svg.find("class=\"hyperbolic\"") != std::string::npos);
    CHECK(slurp(scratch() / "line.csv").rfind("arc_id,h,k\n", 0) == 0);
    CHECK(Json::parse(slurp(scratch() / "line.json"))["arcs"].size() == 1);

    CHECK(run({"trace", "--model", "canonical:1,0,1,0", "--box", "1:2"}).code == 1);
    CHECK(run({"trace", "--model", "canonical:0,1,0,0"}).code == 1);
}

TEST_CASE("kovalevskaya report")
{
    const auto out = scratch() / "k0.json";
    const auto svg = scratch() / "k0.svg";
    const auto r0 = run({"kovalevskaya", "report", "--g", "0", "--out", out.string(), "--svg", svg.string()});
    CHECK(r0.code == 0);
    const auto j = Json::parse(slurp(out));
    CHECK(j == r0.json());
    CHECK(j["regime"] == "a");
    bool a = false, b = false;
    for (const auto& v : j["diagram"]["vertices"]) {
        const double h = v["value"][0], k = v["value"][1];
        a = a || (std::abs(h - 1) <= 1e-10 && std::abs(k - 1) <= 1e-10);
        b = b || (std::abs(h + 1) <= 1e-10 && std::abs(k - 1) <= 1e-10);
    }
    CHECK(a);
    CHECK(b);
    CHECK(std::filesystem::file_size(svg) > 0);

    const auto r16 = run({"kovalevskaya", "report", "--g", "1.6", "--no-diagram"});
    CHECK(r16.code == 0);
    const auto j16 = r16.json();
    CHECK(j16["regime"] == "e");
    CHECK(j16["vertex_types"] == Json::array({"elliptic-elliptic", "hyperbolic-elliptic"}));

    const auto r1 = run({"kovalevskaya", "report", "--g", "1", "--no-diagram"});
    CHECK(r1.code == 0);
    CHECK(r1.json()["regime"].is_null());
}

TEST_CASE("identical configuration gives identical bytes")
{
    const std::vector<std::vector<std::string>> commands = {
        {"verify", "--model", "kovalevskaya", "--g", "0.5", "--seed", "4"},
        {"classify", "--model", "kovalevskaya", "--g", "0.5", "--point", "R1=1,S1=0.5", "--seed", "2"},
        {"kovalevskaya", "report", "--g", "1.3", "--no-diagram"},
        {"atoms", "check", "--product", "(P4 x P4)/D4"},
        {"trace", "--model", "canonical:1,1,0,0"},
    };
    for (const auto& c : commands) {
        const auto a = run(c), b = run(c);
        CHECK(a.code == 0);
        CHECK(a.out == b.out);
    }
    const auto s1 = run({"verify", "--model", "kovalevskaya", "--seed", "1"}).json();
    CHECK(s1["config"]["seed"] == 1);
}

TEST_CASE("usage errors")
{
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"verify", "--model", "kovalevskaya", "--tol", "-1"}).code == 2);
    CHECK(run({"verify", "--model", "kovalevskaya", "--samples", "many"}).code == 2);
    CHECK(run({"--help"}).code == 0);
}
