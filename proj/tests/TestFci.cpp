#include "care/Fci.h"

#include "care/Random.h"
#include "care/SynthGen.h"
#include "TestSupport.h"

#include <doctest.h>

#include <set>

using namespace care;

namespace {

OracleTester chainOracle() {
    Dag g;
    g.names = {"A", "B", "C"};
    g.addEdge("A", "B");
    g.addEdge("B", "C");
    return OracleTester(g);
}

Eigen::MatrixXd rawMatrix(const Dataset& data) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(data.rowCount()),
                      static_cast<Eigen::Index>(data.columnCount()));
    for (size_t r = 0; r < data.rowCount(); ++r)
        for (size_t c = 0; c < data.columnCount(); ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                data.rows[r][c];
    return m;
}

}  // namespace

TEST_CASE("skeleton search recovers the chain") {
    OracleTester oracle = chainOracle();
    Skeleton sk = learnSkeleton(oracle, {"A", "B", "C"}, {});
    CHECK(sk.adjacency[0][1]);
    CHECK(sk.adjacency[1][2]);
    CHECK_FALSE(sk.adjacency[0][2]);
    REQUIRE(sk.sepsets.count({0, 2}) == 1);
    CHECK(sk.sepsets.at({0, 2}) == std::vector<int>{1});
}

TEST_CASE("independent variables yield an empty skeleton") {
    Dag g;
    g.names = {"A", "B", "C"};
    OracleTester oracle(g);
    Skeleton sk = learnSkeleton(oracle, g.names, {});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK_FALSE(sk.adjacency[static_cast<size_t>(i)][static_cast<size_t>(j)]);
    for (const auto& [pair, sep] : sk.sepsets) CHECK(sep.empty());
}

TEST_CASE("collider triples get arrowheads, chains do not") {
    Dag g;
    g.names = {"A", "B", "C"};
    g.addEdge("A", "B");
    g.addEdge("C", "B");
    OracleTester oracle(g);
    Pag pag = orientVStructures(learnSkeleton(oracle, g.names, {}));
    CHECK(pag.mark(0, 1) == EdgeMark::Arrow);
    CHECK(pag.mark(2, 1) == EdgeMark::Arrow);
    CHECK(pag.mark(1, 0) == EdgeMark::Circle);
    CHECK(pag.mark(1, 2) == EdgeMark::Circle);

    OracleTester chain = chainOracle();
    Pag chainPag = orientVStructures(learnSkeleton(chain, {"A", "B", "C"}, {}));
    CHECK(chainPag.mark(0, 1) == EdgeMark::Circle);
    CHECK(chainPag.mark(2, 1) == EdgeMark::Circle);
}

TEST_CASE("a lone edge keeps its circle marks through the rules") {
    Dag g;
    g.names = {"A", "B"};
    g.addEdge("A", "B");
    OracleTester oracle(g);
    Pag pag = runFci(oracle, g.names);
    CHECK(pag.mark(0, 1) == EdgeMark::Circle);
    CHECK(pag.mark(1, 0) == EdgeMark::Circle);
}

TEST_CASE("rule R1 orients away from a collider") {
    // a -> b <- x with b -> c: the v-structure puts an arrow at b, then R1
    // must orient b -> c because a and c are non-adjacent.
    Dag g;
    g.names = {"a", "x", "b", "c"};
    g.addEdge("a", "b");
    g.addEdge("x", "b");
    g.addEdge("b", "c");
    OracleTester oracle(g);
    Pag pag = runFci(oracle, g.names);
    int b = pag.indexOf("b"), c = pag.indexOf("c");
    CHECK(pag.mark(b, c) == EdgeMark::Arrow);
    CHECK(pag.mark(c, b) == EdgeMark::Tail);
}

TEST_CASE("oracle FCI on the synthetic ground truth") {
    Dag g = groundTruthGraph();
    // Only the five observed features plus the label enter FCI; E is latent.
    std::vector<std::string> observed{"X1", "X2", "Xproxy", "Xspur", "Xnoise", "Y"};
    Dag projected;
    projected.names = observed;
    projected.addEdge("X1", "Y");
    projected.addEdge("X2", "Y");
    projected.addEdge("Y", "Xproxy");
    projected.addEdge("Y", "Xspur");
    OracleTester oracle{projected};
    Pag pag = runFci(oracle, observed);

    int y = pag.indexOf("Y");
    int noise = pag.indexOf("Xnoise");
    for (int v = 0; v < pag.size(); ++v)
        if (v != noise) CHECK_FALSE(pag.adjacent(noise, v));

    CHECK(pag.mark(pag.indexOf("X1"), y) == EdgeMark::Arrow);
    CHECK(pag.mark(pag.indexOf("X2"), y) == EdgeMark::Arrow);
    CHECK(pag.mark(pag.indexOf("Xproxy"), y) != EdgeMark::Arrow);
    CHECK(pag.mark(pag.indexOf("Xspur"), y) != EdgeMark::Arrow);

    CausalMask mask = extractMask(pag, "Y");
    REQUIRE(mask.names == std::vector<std::string>{"X1", "X2", "Xproxy", "Xspur", "Xnoise"});
    CHECK(mask.values == std::vector<int>{1, 1, 0, 0, 0});
}

TEST_CASE("extractMask follows the end-mark convention") {
    Pag pag({"X", "Y"});
    auto setEdge = [&](EdgeMark atX, EdgeMark atY) {
        pag.setMark(1, 0, atX);  // mark at the X end
        pag.setMark(0, 1, atY);  // mark at the Y end
    };

    setEdge(EdgeMark::Circle, EdgeMark::Arrow);
    CHECK(extractMask(pag, "Y").values == std::vector<int>{1});

    setEdge(EdgeMark::Arrow, EdgeMark::Tail);  // Y -> X
    CHECK(extractMask(pag, "Y").values == std::vector<int>{0});

    setEdge(EdgeMark::Arrow, EdgeMark::Arrow);  // X <-> Y
    CHECK(extractMask(pag, "Y").values == std::vector<int>{1});

    setEdge(EdgeMark::None, EdgeMark::None);
    CHECK(extractMask(pag, "Y").values == std::vector<int>{0});

    CHECK_THROWS_AS(extractMask(pag, "Z"), std::invalid_argument);
}

TEST_CASE("two independent columns produce no edges") {
    Rng rng(12);
    Eigen::MatrixXd m(100, 2);
    for (int r = 0; r < 100; ++r) {
        m(r, 0) = rng.normal();
        m(r, 1) = rng.normal();
    }
    FisherZTester tester(m);
    Pag pag = runFci(tester, {"u", "v"});
    CHECK_FALSE(pag.adjacent(0, 1));
}

TEST_CASE("fisher FCI finds the oracle adjacency on most seeds") {
    int good = 0;
    for (uint64_t seed = 1; seed <= 5; ++seed) {
        Dataset train = generateSynthetic({1000, DataMode::Train, seed});
        FisherZTester tester(rawMatrix(train));
        Pag pag = runFci(tester, train.names, {0.1, 3});
        int y = pag.indexOf("Y");
        bool ok = pag.adjacent(pag.indexOf("X1"), y) && pag.adjacent(pag.indexOf("X2"), y) &&
                  pag.adjacent(pag.indexOf("Xproxy"), y) &&
                  pag.adjacent(pag.indexOf("Xspur"), y) &&
                  !pag.adjacent(pag.indexOf("Xnoise"), y);
        if (ok) ++good;
    }
    CHECK(good >= 4);
}

TEST_CASE("raising alpha only keeps or adds adjacencies") {
    Dataset train = generateSynthetic({200, DataMode::Train, 8});
    FisherZTester tester(rawMatrix(train));
    Skeleton tight = learnSkeleton(tester, train.names, {0.01, 3});
    Skeleton loose = learnSkeleton(tester, train.names, {0.2, 3});
    for (size_t i = 0; i < train.names.size(); ++i)
        for (size_t j = 0; j < train.names.size(); ++j)
            if (tight.adjacency[i][j]) CHECK(loose.adjacency[i][j]);
}

TEST_CASE("mask extraction is relabel-equivariant") {
    Dataset train = generateSynthetic({1000, DataMode::Train, 1});
    FisherZTester tester(rawMatrix(train));
    Pag pag = runFci(tester, train.names, {0.1, 3});
    CausalMask mask = extractMask(pag, "Y");

    // Reverse the column order and rerun.
    std::vector<size_t> order{5, 4, 3, 2, 1, 0};
    Dataset rev;
    rev.meta = train.meta;
    for (size_t c : order) {
        rev.names.push_back(train.names[c]);
        rev.kinds.push_back(train.kinds[c]);
    }
    for (const auto& row : train.rows) {
        std::vector<double> r;
        for (size_t c : order) r.push_back(row[c]);
        rev.rows.push_back(r);
    }
    FisherZTester revTester(rawMatrix(rev));
    Pag revPag = runFci(revTester, rev.names, {0.1, 3});
    CausalMask revMask = extractMask(revPag, "Y");

    for (size_t i = 0; i < mask.names.size(); ++i) {
        for (size_t j = 0; j < revMask.names.size(); ++j)
            if (revMask.names[j] == mask.names[i])
                CHECK(revMask.values[j] == mask.values[i]);
    }
}

TEST_CASE("mask json round trips and broadcasts to encoded columns") {
    CausalMask mask{{"a", "b", "c"}, {1, 0, 1}};
    CausalMask back = maskFromJson(maskToJson(mask));
    CHECK(back.names == mask.names);
    CHECK(back.values == mask.values);

    // b expands to three one-hot columns, all inheriting its zero.
    Eigen::VectorXd cols =
        broadcastMask(mask, {0, 1, 1, 1, 2}, {"a", "b", "c"});
    REQUIRE(cols.size() == 5);
    CHECK(cols(0) == 1.0);
    CHECK(cols(1) == 0.0);
    CHECK(cols(2) == 0.0);
    CHECK(cols(3) == 0.0);
    CHECK(cols(4) == 1.0);
}
