from database import (
    MAX_ENGINES,
    CacheEntry,
    _engines,
    _session,
    check_database_connection,
    dispose_engines,
    init_db,
    load_entry,
    make_key,
    payload_digest,
    store_entry,
)
from handlers.common import cached_payload

PARAMS = {"n": 1, "q_mode": "generic", "check": True}


def test_init_and_connection(cache_dir):
    assert init_db(cache_dir)
    assert check_database_connection(cache_dir)


def test_store_and_load(cache_dir):
    key = make_key("pn", PARAMS)
    assert load_entry(key, cache_dir) is None
    assert store_entry(key, "pn", PARAMS, '{"n": 1}', cache_dir)
    assert load_entry(key, cache_dir) == '{"n": 1}'
    # повторная запись заменяет старую
    assert store_entry(key, "pn", PARAMS, '{"n": 2}', cache_dir)
    assert load_entry(key, cache_dir) == '{"n": 2}'


def test_key_is_canonical():
    assert make_key("pn", {"n": 1, "q_mode": "generic"}) == make_key("pn", {"q_mode": "generic", "n": 1})
    assert make_key("pn", PARAMS) != make_key("pairing", PARAMS)
    assert make_key("pn", {"n": 1}) != make_key("pn", {"n": -1})


def test_corrupted_entry_is_dropped(cache_dir):
    key = make_key("pn", PARAMS)
    store_entry(key, "pn", PARAMS, '{"n": 1}', cache_dir)
    session = _session(cache_dir)
    try:
        entry = session.query(CacheEntry).filter(CacheEntry.key == key).one()
        entry.payload = '{"n": 42}'
        session.commit()
    finally:
        session.close()

    assert load_entry(key, cache_dir) is None
    session = _session(cache_dir)
    try:
        assert session.query(CacheEntry).filter(CacheEntry.key == key).count() == 0
    finally:
        session.close()


def test_entry_metadata(cache_dir):
    key = make_key("pn", PARAMS)
    store_entry(key, "pn", PARAMS, "{}", cache_dir)
    session = _session(cache_dir)
    try:
        entry = session.query(CacheEntry).filter(CacheEntry.key == key).one()
        assert (entry.command, entry.n, entry.q_mode) == ("pn", 1, "generic")
        assert entry.digest == payload_digest("{}")
    finally:
        session.close()


def test_cached_payload_computes_once(cache_dir):
    calls = []

    def compute():
        calls.append(1)
        return {"value": 0.1 + 0.2}

    first = cached_payload("pairing", {"k": 1}, compute)
    second = cached_payload("pairing", {"k": 1}, compute)
    assert first == second
    assert len(calls) == 1
    assert '"value": 0.3' in first

    cached_payload("pairing", {"k": 1}, compute, use_cache=False)
    assert len(calls) == 2


def test_engine_cache_is_bounded(tmp_path):
    dirs = [str(tmp_path / f"cache{i}") for i in range(MAX_ENGINES + 3)]
    for path in dirs:
        assert init_db(path)
    assert len(_engines) <= MAX_ENGINES
    assert dirs[-1] in _engines
    assert dirs[0] not in _engines
    # закрытый каталог открывается заново без потери данных
    key = make_key("pn", PARAMS)
    assert store_entry(key, "pn", PARAMS, "{}", dirs[0])
    assert load_entry(key, dirs[0]) == "{}"
    dispose_engines()
    assert not _engines
