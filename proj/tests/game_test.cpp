#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>
#include <tuple>

#include "lelma/game/game_spec.hpp"

using namespace lelma::game;

namespace {

using Row = std::tuple<std::string, std::string, std::int64_t, std::int64_t>;

std::set<Row> outcome_rows(const std::vector<Outcome>& outcomes) {
  std::set<Row> out;
  for (const auto& o : outcomes) out.insert({o.p1_move, o.p2_move, o.u1, o.u2});
  return out;
}

std::string pd_source() { return read_text_file(games_directory() / "prisoners_dilemma.gdl"); }

std::string replace(std::string s, const std::string& from, const std::string& to) {
  auto pos = s.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  if (pos != std::string::npos) s.replace(pos, from.size(), to);
  return s;
}

GameError parse_error(const std::string& src) {
  try {
    parse_game(src);
  } catch (const GameError& e) {
    return e;
  }
  ADD_FAILURE() << "expected a GameError";
  return GameError(GameError::Kind::not_found, "none");
}

}  // namespace

TEST(GameIndependentRules, MatchListings) {
  const auto& rules = game_independent_rules();
  ASSERT_EQ(rules.size(), 5u);
  EXPECT_EQ(rules[0].to_string(), "game(F,F) :- final(F).");
  EXPECT_EQ(rules[1].to_string(), "game(S,F) :- \\+ final(S), legal(M,S), game(do(M,S),F).");
  EXPECT_EQ(rules[4].to_string(), "holds(F,do(M,S)) :- holds(F,S), \\+ abnormal(F,M,S).");
  EXPECT_EQ(&game_independent_rules(), &rules);
}

TEST(ParseGame, PrisonersDilemmaPayoffs) {
  auto g = parse_game(pd_source());
  EXPECT_EQ(g.name(), "prisoners_dilemma");
  const auto& e = g.payoffs().entries;
  EXPECT_EQ(e.at({"D", "D"}), (Payoff{1, 1}));
  EXPECT_EQ(e.at({"C", "D"}), (Payoff{0, 5}));
  EXPECT_EQ(e.at({"D", "C"}), (Payoff{5, 0}));
  EXPECT_EQ(e.at({"C", "C"}), (Payoff{3, 3}));
  EXPECT_EQ(*g.move_for({"R"}), "D");
  EXPECT_EQ(*g.move_for({"B"}), "C");
  EXPECT_EQ(g.roles().reasoner, "p1");
  EXPECT_EQ(g.payoffs().moves_row, (std::vector<std::string>{"D", "C"}));
}

TEST(ParseGame, MissingPeriodIsSyntaxError) {
  auto e = parse_error("%! name: x\n%! labels: R='D', B='C'\npayoff('D','D',1,1)");
  EXPECT_EQ(e.kind(), GameError::Kind::syntax);
  EXPECT_EQ(e.line(), 3u);
  EXPECT_EQ(e.expected(), "'.'");
}

TEST(ParseGame, MissingPayoffPair) {
  auto e = parse_error(replace(pd_source(), "payoff('C', 'C', 3, 3).", ""));
  EXPECT_EQ(e.kind(), GameError::Kind::incomplete_payoffs);
  EXPECT_NE(std::string(e.what()).find("(C, C)"), std::string::npos);
}

TEST(ParseGame, DuplicatePayoff) {
  auto e = parse_error(replace(pd_source(), "payoff('C', 'C', 3, 3).", "payoff('C', 'C', 3, 3).\npayoff('C', 'C', 2, 2)."));
  EXPECT_EQ(e.kind(), GameError::Kind::invalid_payoff);
}

TEST(ParseGame, MissingPredicate) {
  auto src = replace(pd_source(), "abnormal(control(P), choice(P, M), S).", "");
  auto e = parse_error(src);
  EXPECT_EQ(e.kind(), GameError::Kind::missing_predicate);
  EXPECT_NE(std::string(e.what()).find("abnormal/3"), std::string::npos);
}

TEST(ParseGame, LabelMapMustBeBijection) {
  EXPECT_EQ(parse_error(replace(pd_source(), "R='D', B='C'", "R='D', B='D'")).kind(), GameError::Kind::invalid_label_map);
  EXPECT_EQ(parse_error(replace(pd_source(), "R='D', B='C'", "R='D', X='C'")).kind(), GameError::Kind::invalid_label_map);
  EXPECT_EQ(parse_error(replace(pd_source(), "R='D', B='C'", "R='D', B='X'")).kind(), GameError::Kind::invalid_label_map);
  EXPECT_EQ(parse_error(replace(pd_source(), "%! labels: R='D', B='C'\n", "")).kind(), GameError::Kind::invalid_label_map);
}

TEST(ParseGame, UnknownMetadataKey) {
  EXPECT_EQ(parse_error("%! colour: red\n" + pd_source()).kind(), GameError::Kind::invalid_metadata);
}

TEST(BundledGames, OutcomesMatchPayoffTables) {
  std::map<std::string, std::set<Row>> expected{
      {"prisoners_dilemma", {{"D", "D", 1, 1}, {"D", "C", 5, 0}, {"C", "D", 0, 5}, {"C", "C", 3, 3}}},
      {"stag_hunt", {{"Hare", "Hare", 1, 1}, {"Hare", "Stag", 3, 0}, {"Stag", "Hare", 0, 3}, {"Stag", "Stag", 5, 5}}},
      {"hawk_dove", {{"Hawk", "Hawk", 0, 0}, {"Hawk", "Dove", 5, 1}, {"Dove", "Hawk", 1, 5}, {"Dove", "Dove", 3, 3}}},
  };
  for (const auto& name : bundled_game_names()) {
    auto g = load_game(name);
    auto outcomes = enumerate_outcomes(g);
    EXPECT_EQ(outcomes.size(), 4u) << name;
    EXPECT_EQ(outcome_rows(outcomes), expected.at(name)) << name;
    for (const auto& o : outcomes) EXPECT_EQ(g.payoffs().at(o.p1_move, o.p2_move), (Payoff{o.u1, o.u2}));
  }
}

TEST(BundledGames, SolverAgreesWithDirectEnumeration) {
  for (const auto& name : bundled_game_names()) {
    auto g = load_game(name);
    std::multiset<std::string> solved, direct;
    for (const auto& o : solve_final_outcomes(g))
      solved.insert(o.situation.to_string() + " " + o.p1_move + o.p2_move + std::to_string(o.u1) + std::to_string(o.u2));
    for (const auto& o : enumerate_move_sequences(g))
      direct.insert(o.situation.to_string() + " " + o.p1_move + o.p2_move + std::to_string(o.u1) + std::to_string(o.u2));
    EXPECT_EQ(solved, direct) << name;
  }
}

TEST(BundledGames, EachMovePairReachedByBothOrders) {
  for (const auto& name : bundled_game_names()) {
    std::map<std::pair<std::string, std::string>, int> count;
    for (const auto& o : solve_final_outcomes(load_game(name))) ++count[{o.p1_move, o.p2_move}];
    EXPECT_EQ(count.size(), 4u);
    for (const auto& [pair, n] : count) EXPECT_EQ(n, 2) << name << " " << pair.first << "," << pair.second;
  }
}

TEST(BundledGames, OutcomeInequalities) {
  // T: temptation, R: reward, P: punishment, S: sucker, read off the row player.
  auto tr = [](const GameSpec& g) {
    const auto& p = g.payoffs();
    const auto& r = p.moves_row[0];  // 'R' label: defect-like move
    const auto& b = p.moves_row[1];  // 'B' label: cooperate-like move
    return std::array<std::int64_t, 4>{p.at(r, b).row, p.at(b, b).row, p.at(r, r).row, p.at(b, r).row};
  };
  auto [t1, r1, p1, s1] = tr(load_game("pd"));
  EXPECT_EQ((std::array<std::int64_t, 4>{t1, r1, p1, s1}), (std::array<std::int64_t, 4>{5, 3, 1, 0}));
  EXPECT_TRUE(t1 > r1 && r1 > p1 && p1 > s1);
  auto [t2, r2, p2, s2] = tr(load_game("sh"));
  EXPECT_TRUE(r2 > t2 && t2 > p2 && p2 > s2);
  auto [t3, r3, p3, s3] = tr(load_game("hd"));
  EXPECT_TRUE(t3 > r3 && r3 > s3 && s3 > p3);
}

TEST(BundledGames, SymmetricMatrices) {
  for (const auto& name : bundled_game_names()) EXPECT_TRUE(load_game(name).payoffs().symmetric()) << name;
}

TEST(BundledGames, SourceRoundTrip) {
  for (const auto& name : bundled_game_names()) {
    auto g = load_game(name);
    auto again = parse_game(to_source(g));
    EXPECT_EQ(again, g) << name;
    EXPECT_EQ(to_source(again), to_source(g));
  }
}

TEST(GameProperty, RandomisedGamesRoundTrip) {
  // Random move names, payoffs, label order and roles over the bundled schema.
  std::mt19937 rng(4242);
  const std::string base = pd_source();
  const char* names[] = {"Up", "Down", "left", "right", "'x y'", "Mv1", "mv2", "Q"};
  for (int i = 0; i < 1200; ++i) {
    std::string a = names[rng() % 8], b;
    do b = names[rng() % 8]; while (b == a);
    auto quote = [](const std::string& n) { return n[0] == '\'' ? n : "'" + n + "'"; };
    std::string src = base;
    src = replace(src, "possible(choice(P,'D'), S)", "possible(choice(P," + quote(a) + "), S)");
    src = replace(src, "possible(choice(P,'C'), S)", "possible(choice(P," + quote(b) + "), S)");
    std::string payoffs;
    std::map<std::pair<std::string, std::string>, Payoff> expected;
    for (const auto& m1 : {a, b})
      for (const auto& m2 : {a, b}) {
        std::int64_t u1 = static_cast<std::int64_t>(rng() % 21) - 10, u2 = static_cast<std::int64_t>(rng() % 21) - 10;
        payoffs += "payoff(" + quote(m1) + ", " + quote(m2) + ", " + std::to_string(u1) + ", " + std::to_string(u2) + ").\n";
        auto strip = [](std::string n) { return n[0] == '\'' ? n.substr(1, n.size() - 2) : n; };
        expected[{strip(m1), strip(m2)}] = Payoff{u1, u2};
      }
    auto pstart = src.find("payoff('D', 'D', 1, 1).");
    auto pend = src.find("payoff('C', 'C', 3, 3).") + std::string("payoff('C', 'C', 3, 3).").size();
    src.replace(pstart, pend - pstart, payoffs);
    const bool swap = rng() % 2;
    src = replace(src, "R='D', B='C'", swap ? "B=" + quote(b) + ", R=" + quote(a) : "R=" + quote(a) + ", B=" + quote(b));

    auto g = parse_game(src);
    ASSERT_EQ(g.payoffs().entries, expected);
    auto again = parse_game(to_source(g));
    ASSERT_EQ(again, g);
  }
}

TEST(LoadGame, AliasesAndErrors) {
  EXPECT_EQ(load_game("pd").name(), "prisoners_dilemma");
  EXPECT_EQ(load_game((games_directory() / "stag_hunt.gdl").string()).name(), "stag_hunt");
  try {
    load_game("chess");
    FAIL();
  } catch (const GameError& e) {
    EXPECT_EQ(e.kind(), GameError::Kind::not_found);
  }
}
