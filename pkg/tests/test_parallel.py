from hptk.parallel import pmap, thread_count


def test_pmap_order(monkeypatch):
    monkeypatch.setenv("HPTK_THREADS", "4")
    assert thread_count() == 4
    assert pmap(lambda x: x * x, range(50)) == [x * x for x in range(50)]
    monkeypatch.setenv("HPTK_THREADS", "junk")
    assert thread_count() == 1
