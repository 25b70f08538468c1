import sys

# The reference evaluator recurses on term structure; raise the limit once so
# hypothesis does not see it change mid-test.
sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))
