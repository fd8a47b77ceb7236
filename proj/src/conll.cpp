#include "negaff/conll.hpp"

#include <fstream>
#include <sstream>

#include "negaff/corpus_io.hpp"
#include "negaff/error.hpp"
#include "negaff/unicode.hpp"

namespace negaff {

namespace {

std::vector<std::string> split_columns(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> cols;
  std::string c;
  while (in >> c) cols.push_back(c);
  return cols;
}

}  // namespace

std::vector<LabeledSequence> read_two_column(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open sequence file: " + path);
  std::vector<LabeledSequence> out;
  LabeledSequence current;
  std::string line;
  uint64_t line_no = 0;
  auto flush = [&] {
    if (!current.tokens.empty()) {
      if (!bio_valid(current.tags)) {
        fail(path + ": invalid BIO sequence ending at line " + std::to_string(line_no));
      }
      out.push_back(std::move(current));
      current = {};
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) {
      flush();
      continue;
    }
    const size_t tab = t.find('\t');
    if (tab == std::string::npos) {
      fail(path + ":" + std::to_string(line_no) + ": expected 'token<TAB>tag'");
    }
    current.tokens.push_back(t.substr(0, tab));
    current.tags.push_back(trim(t.substr(tab + 1)));
  }
  flush();
  return out;
}

std::vector<TaggedSentence> read_sem_conll(const std::string& path, const std::string& lang,
                                           const SemConllOptions& options) {
  std::ifstream in(path);
  if (!in) fail("cannot open conll file: " + path);

  struct Row {
    std::string token;
    std::string cue;  // empty means no annotation
  };
  std::vector<TaggedSentence> out;
  std::vector<Row> rows;
  std::string line;
  uint64_t line_no = 0;

  auto flush = [&] {
    if (rows.empty()) return;
    TaggedSentence s;
    s.lang = lang;
    size_t offset = 0;
    for (size_t i = 0; i < rows.size(); ++i) {
      if (i) {
        s.sentence += ' ';
        ++offset;
      }
      Token tok;
      tok.text = rows[i].token;
      tok.start = offset;
      tok.end = offset + rows[i].token.size();
      tok.index = i;
      offset = tok.end;
      s.sentence += rows[i].token;
      s.tokens.push_back(std::move(tok));
    }
    s.tags.assign(rows.size(), "O");

    for (size_t i = 0; i < rows.size();) {
      if (rows[i].cue.empty()) {
        ++i;
        continue;
      }
      const std::string low_tok = uni::lower(rows[i].token);
      const std::string low_cue = uni::lower(rows[i].cue);
      if (low_cue != low_tok && low_tok.find(low_cue) != std::string::npos) {
        // Affix annotation: the cue string is a proper substring of the token.
        CueSpan span;
        span.token_indices = {i};
        span.surface = rows[i].token;
        span.kind = CueKind::affixal;
        span.affix = low_cue;
        span.affix_side =
            low_tok.starts_with(low_cue) ? AffixSide::prefix : AffixSide::suffix;
        if (options.affixal_as_token) s.tags[i] = "B-CUE";
        s.cues.push_back(std::move(span));
        ++i;
        continue;
      }
      // Full-token cue; adjacent annotated full tokens form one span.
      CueSpan span;
      size_t j = i;
      while (j < rows.size() && !rows[j].cue.empty() &&
             uni::lower(rows[j].cue) == uni::lower(rows[j].token)) {
        span.token_indices.push_back(j);
        s.tags[j] = (j == i) ? "B-CUE" : "I-CUE";
        ++j;
      }
      std::string surface;
      for (size_t k : span.token_indices) {
        if (!surface.empty()) surface += ' ';
        surface += rows[k].token;
      }
      span.surface = std::move(surface);
      span.kind = span.token_indices.size() > 1 ? CueKind::multitoken : CueKind::single_token;
      s.cues.push_back(std::move(span));
      i = j;
    }
    out.push_back(std::move(s));
    rows.clear();
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      flush();
      continue;
    }
    const auto cols = split_columns(line);
    if (cols.size() <= options.token_column) {
      fail(path + ":" + std::to_string(line_no) + ": missing token column " +
           std::to_string(options.token_column));
    }
    Row row;
    row.token = cols[options.token_column];
    if (cols.size() > options.cue_column) {
      const std::string& cue = cols[options.cue_column];
      if (cue != "_" && cue != "***" && !cue.empty()) row.cue = cue;
    }
    rows.push_back(std::move(row));
  }
  flush();
  return out;
}

TaggedSentence to_tagged(const LabeledSequence& seq, const std::string& lang,
                         const CueLexicon* lexicon) {
  TaggedSentence s;
  s.lang = lang;
  size_t offset = 0;
  for (size_t i = 0; i < seq.tokens.size(); ++i) {
    if (i) {
      s.sentence += ' ';
      ++offset;
    }
    Token tok;
    tok.text = seq.tokens[i];
    tok.start = offset;
    tok.end = offset + seq.tokens[i].size();
    tok.index = i;
    offset = tok.end;
    s.sentence += seq.tokens[i];
    s.tokens.push_back(std::move(tok));
  }
  s.tags = seq.tags;
  if (!bio_valid(s.tags)) fail("to_tagged: invalid BIO sequence");
  s.cues = spans_from_tags(s.tokens, s.tags, lexicon);
  return s;
}

}  // namespace negaff
