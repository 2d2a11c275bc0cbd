import io
import json

from clonelog.features import FeatureVector, extract_features, feature_delta, token_bag, write_features_jsonl
from clonelog.ingest import strip_logs
from conftest import java_methods

LOCAL = {"createPassword", "retrivePasswordInternal", "getResponseLine"}

ONE_LOG = """
  protected byte[] retrivePasswordInternal(NMTokenIdentifier identifier,
      MasterKeyData masterKey) {
    LOG.debug("Response line: " + identifier.getResponseLine());
    return createPassword(identifier.getBytes(), masterKey.getSecretKey());
  }
"""


def test_removing_one_log_changes_each_feature_by_its_share():
    (m,) = java_methods(ONE_LOG)
    before = extract_features(m, LOCAL)
    after = extract_features(strip_logs(m), LOCAL)
    d = feature_delta(after, before)
    assert d["ntok"] == -6
    assert (d["sloc"], d["nos"], d["nexp"], d["lmet"], d["xmet"]) == (-1, -1, -1, -1, -1)
    assert d["elps"] == (False, True)
    assert before.lwk == {"LOG.debug"} and after.lwk == frozenset()


def test_log_aware_vector_ignores_logs(listing_methods):
    for m in listing_methods:
        aware = extract_features(m, LOCAL, "log_aware")
        assert aware.method_id == m.id
        assert not aware.elps and aware.lwk == frozenset()
        assert aware.numeric() == extract_features(strip_logs(m), LOCAL).numeric()


def test_listing_raw_counts(listing_methods):
    m = next(x for x in listing_methods if x.name == "createPassword")
    v = extract_features(m, LOCAL | {"createPassword"})
    assert (v.ntok, v.nos, v.nexp, v.lmet, v.xmet, v.sloc) == (34, 6, 4, 1, 8, 12)
    assert v.elps


def test_counts_control_flow():
    (m,) = java_methods(
        """int f(int n) {
            int s = 0;
            for (int i = 0; i < n; i++) {
                if (i % 2 == 0) s += i; else s -= 1;
            }
            while (s > 100) { s = s / 2; }
            return s;
        }"""
    )
    v = extract_features(m)
    # decl, for, if, else, two assignments, while, assignment, return
    assert v.nos == 9
    # decl, three headers, three assignments, return with value
    assert v.nexp == 8
    assert v.lmet == 0 and v.xmet == 0


def test_call_kinds():
    m = java_methods("void f() { helper(); a.b(); new Foo(); g(h()); }\nvoid helper() {}")[0]
    v = extract_features(m, {"f", "helper", "g"})
    assert v.lmet == 2  # helper, g
    assert v.xmet == 2  # b, h


def test_token_bag_includes_literal_words():
    (m,) = java_methods('void f() { log.info("cache warmed"); x = y; }')
    bag = token_bag(m)
    assert bag["cache"] == 1 and bag["x"] == 1
    assert "cache" not in token_bag(strip_logs(m))


def test_vector_record_round_trip(listing_methods):
    vecs = [extract_features(m, LOCAL) for m in listing_methods]
    buf = io.StringIO()
    write_features_jsonl(vecs, buf)
    back = [FeatureVector.from_record(json.loads(line)) for line in buf.getvalue().splitlines()]
    assert back == vecs
