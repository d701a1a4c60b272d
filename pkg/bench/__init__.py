# Benchmark suite for qna performance testing
