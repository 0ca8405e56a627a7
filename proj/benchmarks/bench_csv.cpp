#include <benchmark/benchmark.h>

#include <string>

#include "erctk/csv.hpp"

namespace {

std::string make_csv(int rows, bool quoted) {
  std::string data = "Sr No.,Utterance,Speaker,Emotion,Dialogue_ID,Utterance_ID\n";
  for (int i = 0; i < rows; ++i) {
    data += std::to_string(i);
    if (quoted) {
      data += ",\"Well, this field has a comma, a \"\"quote\"\", and\nan embedded newline.\"";
    } else {
      data += ",An ordinary utterance with no quoting at all";
    }
    data += ",Speaker" + std::to_string(i % 6) + ",neutral," + std::to_string(i / 10) + "," +
            std::to_string(i % 10) + "\n";
  }
  return data;
}

void BM_CsvParsePlain(benchmark::State& state) {
  std::string data = make_csv(static_cast<int>(state.range(0)), false);
  for (auto _ : state) {
    erctk::csv::Table table = erctk::csv::parse(data);
    benchmark::DoNotOptimize(table.rows.size());
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(data.size()));
}

void BM_CsvParseQuoted(benchmark::State& state) {
  std::string data = make_csv(static_cast<int>(state.range(0)), true);
  for (auto _ : state) {
    erctk::csv::Table table = erctk::csv::parse(data);
    benchmark::DoNotOptimize(table.rows.size());
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(data.size()));
}

void BM_CsvParseTsv(benchmark::State& state) {
  std::string data = make_csv(static_cast<int>(state.range(0)), false);
  for (char& c : data)
    if (c == ',') c = '\t';
  for (auto _ : state) {
    erctk::csv::Table table = erctk::csv::parse(data, '\t');
    benchmark::DoNotOptimize(table.rows.size());
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(data.size()));
}

BENCHMARK(BM_CsvParsePlain)->Range(64, 8192);
BENCHMARK(BM_CsvParseQuoted)->Range(64, 8192);
BENCHMARK(BM_CsvParseTsv)->Range(64, 8192);

}  // namespace
