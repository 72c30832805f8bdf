#include "amnl/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "amnl/irmf.hpp"
#include "amnl/log.hpp"

namespace amnl {

namespace {

using json = nlohmann::json;

[[noreturn]] void parse_fail(const std::string& path, std::size_t line, const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

std::vector<std::string> split_csv_row(const std::string& row) {
  std::vector<std::string> out;
  std::stringstream ss(row);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!row.empty() && row.back() == ',') out.push_back("");
  return out;
}

std::size_t intern_user(IRMGraph& g, const std::string& id) {
  auto it = g.user_index.find(id);
  if (it != g.user_index.end()) return it->second;
  std::size_t idx = g.users.size();
  g.users.push_back(id);
  g.user_index.emplace(id, idx);
  return idx;
}

std::int64_t parse_time(const std::string& s, const std::string& path, std::size_t line) {
  try {
    std::size_t pos = 0;
    std::int64_t v = std::stoll(s, &pos);
    if (pos != s.size()) parse_fail(path, line, "bad timestamp '" + s + "'");
    return v;
  } catch (const std::invalid_argument&) {
    parse_fail(path, line, "bad timestamp '" + s + "'");
  } catch (const std::out_of_range&) {
    parse_fail(path, line, "timestamp out of range '" + s + "'");
  }
}

void load_tweets(IRMGraph& g, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      parse_fail(path, lineno, e.what());
    }
    if (!j.is_object() || !j.contains("tweet_id") || !j.contains("user_id") ||
        !j.contains("timestamp") || !j.contains("comments")) {
      parse_fail(path, lineno, "expected keys tweet_id, user_id, timestamp, comments");
    }
    if (!j["tweet_id"].is_string() || !j["user_id"].is_string() ||
        !j["timestamp"].is_number_integer() || !j["comments"].is_array()) {
      parse_fail(path, lineno, "bad field types");
    }
    ImageTweet t;
    t.id = j["tweet_id"].get<std::string>();
    if (g.tweet_index.count(t.id)) parse_fail(path, lineno, "duplicate tweet id " + t.id);
    t.publisher = intern_user(g, j["user_id"].get<std::string>());
    t.timestamp = j["timestamp"].get<std::int64_t>();
    for (const auto& c : j["comments"]) {
      if (!c.is_string()) parse_fail(path, lineno, "comments must be strings");
      t.comments.push_back(c.get<std::string>());
    }
    if (t.comments.empty()) {
      parse_fail(path, lineno, "tweet " + t.id + " has no comments");
    }
    g.tweet_index.emplace(t.id, g.tweets.size());
    g.tweets.push_back(std::move(t));
  }
}

void load_follows(IRMGraph& g, const std::string& path,
                  std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) parse_fail(path, 1, "missing header");
  ++lineno;
  if (strip_cr(line) != "follower_id,followee_id") {
    parse_fail(path, 1, "expected header 'follower_id,followee_id'");
  }
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto fields = split_csv_row(line);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      parse_fail(path, lineno, "expected 'follower_id,followee_id'");
    }
    std::size_t a = intern_user(g, fields[0]);
    std::size_t b = intern_user(g, fields[1]);
    if (a == b) parse_fail(path, lineno, "self-follow edge for user " + fields[0]);
    edges.emplace_back(a, b);
  }
}

void load_retweets(IRMGraph& g, const std::string& path, LoadReport& report) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) parse_fail(path, 1, "missing header");
  ++lineno;
  if (strip_cr(line) != "user_id,tweet_id,timestamp") {
    parse_fail(path, 1, "expected header 'user_id,tweet_id,timestamp'");
  }
  // (user, tweet) -> earliest timestamp; duplicates collapse.
  std::map<std::pair<std::size_t, std::size_t>, std::int64_t> earliest;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto fields = split_csv_row(line);
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) {
      parse_fail(path, lineno, "expected 'user_id,tweet_id,timestamp'");
    }
    std::size_t user = intern_user(g, fields[0]);
    auto it = g.tweet_index.find(fields[1]);
    if (it == g.tweet_index.end()) {
      parse_fail(path, lineno, "unknown tweet id " + fields[1]);
    }
    std::int64_t ts = parse_time(fields[2], path, lineno);
    auto key = std::make_pair(user, it->second);
    auto [slot, inserted] = earliest.emplace(key, ts);
    if (!inserted) {
      slot->second = std::min(slot->second, ts);
      ++report.duplicate_retweets;
      log_info("duplicate retweet of " + fields[1] + " by " + fields[0] +
               " collapsed to earliest");
    }
  }
  for (const auto& [key, ts] : earliest) {
    g.events.push_back(RetweetEvent{key.first, key.second, ts});
  }
}

void attach_features(IRMGraph& g, const std::string& path, LoadReport& report) {
  std::vector<IrmfRecord> records = read_irmf(path);
  std::unordered_map<std::string, const IrmfRecord*> by_id;
  for (const IrmfRecord& rec : records) by_id.emplace(rec.tweet_id, &rec);
  for (ImageTweet& t : g.tweets) {
    auto it = by_id.find(t.id);
    if (it == by_id.end()) {
      throw std::runtime_error("feature record missing for tweet " + t.id);
    }
    const NamedTensor* conv = nullptr;
    const NamedTensor* fc = nullptr;
    for (const NamedTensor& nt : it->second->tensors) {
      if (nt.name == "conv") conv = &nt;
      if (nt.name == "fc") fc = &nt;
    }
    if (!conv || !fc) {
      throw std::runtime_error("tweet " + t.id + " needs tensors 'conv' and 'fc'");
    }
    if (conv->shape.size() != 3 || conv->shape[0] != conv->shape[1]) {
      throw std::runtime_error("tweet " + t.id + ": conv grid must be square [G,G,C], got [" +
                               shape_str(conv->shape) + "]");
    }
    if (fc->shape.size() != 1 || fc->shape[0] != conv->shape[2]) {
      throw std::runtime_error("tweet " + t.id +
                               ": fc dim must equal conv channel dim, got [" +
                               shape_str(fc->shape) + "] vs [" + shape_str(conv->shape) + "]");
    }
    if (g.grid == 0) {
      g.grid = conv->shape[0];
      g.channels = conv->shape[2];
    } else if (conv->shape[0] != g.grid || conv->shape[2] != g.channels) {
      throw std::runtime_error("tweet " + t.id + ": feature dims differ from earlier tweets");
    }
    t.conv = Tensor(conv->shape, conv->data);
    t.global = Tensor(fc->shape, fc->data);
  }
  if (records.size() > g.tweets.size()) {
    report.unused_feature_records = records.size() - g.tweets.size();
    log_info(std::to_string(report.unused_feature_records) +
             " feature records have no matching tweet");
  }
}

}  // namespace

const std::vector<std::size_t>& IRMGraph::followees_of(const std::string& user_id) const {
  auto it = user_index.find(user_id);
  if (it == user_index.end()) throw std::invalid_argument("unknown user id " + user_id);
  return followees[it->second];
}

bool contains(const std::vector<std::size_t>& sorted, std::size_t v) {
  return std::binary_search(sorted.begin(), sorted.end(), v);
}

IRMGraph load_dataset(const std::string& tweets_path, const std::string& follows_path,
                      const std::string& retweets_path, const std::string& features_path,
                      LoadReport* report) {
  IRMGraph g;
  LoadReport local;
  load_tweets(g, tweets_path);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  load_follows(g, follows_path, edges);
  load_retweets(g, retweets_path, local);
  attach_features(g, features_path, local);

  g.followees.assign(g.num_users(), {});
  for (auto [a, b] : edges) g.followees[a].push_back(b);
  for (auto& n : g.followees) {
    std::sort(n.begin(), n.end());
    n.erase(std::unique(n.begin(), n.end()), n.end());
  }
  g.published_by.assign(g.num_users(), {});
  for (std::size_t i = 0; i < g.tweets.size(); ++i) {
    g.published_by[g.tweets[i].publisher].push_back(i);
  }
  std::sort(g.events.begin(), g.events.end(), [](const RetweetEvent& a, const RetweetEvent& b) {
    return std::tie(a.user, a.time, a.tweet) < std::tie(b.user, b.time, b.tweet);
  });
  if (report) *report = local;
  return g;
}

SplitGraph temporal_split(const IRMGraph& g, double ratio, bool global_time) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw std::invalid_argument("split ratio must lie in (0,1)");
  }
  SplitGraph s;
  s.graph = &g;
  s.train_pos.assign(g.num_users(), {});
  s.test_pos.assign(g.num_users(), {});

  // ceil with a small backoff so ratios like 0.8 * 10 don't round up to 9
  // through floating-point residue.
  auto head_count = [ratio](std::size_t n) {
    return static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(n) - 1e-9));
  };

  if (global_time) {
    std::vector<RetweetEvent> all = g.events;
    std::sort(all.begin(), all.end(), [](const RetweetEvent& a, const RetweetEvent& b) {
      return std::tie(a.time, a.user, a.tweet) < std::tie(b.time, b.user, b.tweet);
    });
    std::size_t n_train = head_count(all.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
      (i < n_train ? s.train_events : s.test_events).push_back(all[i]);
    }
  } else {
    std::vector<std::vector<RetweetEvent>> per_user(g.num_users());
    for (const RetweetEvent& e : g.events) per_user[e.user].push_back(e);
    for (auto& evs : per_user) {
      std::sort(evs.begin(), evs.end(), [](const RetweetEvent& a, const RetweetEvent& b) {
        return std::tie(a.time, a.tweet) < std::tie(b.time, b.tweet);
      });
      std::size_t n_train = head_count(evs.size());
      for (std::size_t i = 0; i < evs.size(); ++i) {
        (i < n_train ? s.train_events : s.test_events).push_back(evs[i]);
      }
    }
  }
  for (const RetweetEvent& e : s.train_events) s.train_pos[e.user].push_back(e.tweet);
  for (const RetweetEvent& e : s.test_events) s.test_pos[e.user].push_back(e.tweet);
  for (auto& v : s.train_pos) std::sort(v.begin(), v.end());
  for (auto& v : s.test_pos) std::sort(v.begin(), v.end());
  return s;
}

}  // namespace amnl
