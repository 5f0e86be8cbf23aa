import io
import os
from collections import Counter

import pytest

from scripts.core.datagen import emit_xml
from scripts.core.exceptions import (
    DataFileNotFoundError, InvalidParameterError, MalformedXml, OversizedElement,
)
from scripts.core.ingest import (
    SKIP_EMPTY_TITLE, SKIP_INVALID_YEAR, SKIP_MISSING_KEY, SKIP_UNMAPPED, ingest_stream, map_kind,
)
from scripts.core.model import CanonicalRecord, RecordKind, VenueRef, VenueType

SAMPLE = b"""<?xml version="1.0" encoding="UTF-8"?>
<dblp>
<article key="journals/tods/A1">
  <author>Alice</author><author>Bob</author>
  <title>Database <i>Text</i> Mining</title>
  <pages>1-10</pages><year>2001</year><volume>26</volume>
  <journal>ACM Trans. Database Syst.</journal><number>2</number>
  <ee>https://doi.org/x</ee>
</article>
<inproceedings key="conf/vldb/B2">
  <author>Carol</author>
  <title>Text Mining</title><year>1999</year><booktitle>VLDB</booktitle>
  <url>db/conf/vldb/vldb99.html</url>
</inproceedings>
<www key="homepages/x"><author>Someone</author><title>Home Page</title></www>
<book key="books/C3"><editor>Ed</editor><title>A Book</title><year>2010</year>
  <publisher>Springer</publisher><isbn>978-3</isbn></book>
<incollection key="books/D4"><author>Dan</author><title></title><year>2011</year></incollection>
<article key="journals/x/E5"><title>Bad year</title><year>n/a</year></article>
<article><title>No key</title><year>2000</year></article>
</dblp>
"""


def _ingest(data: bytes, **kwargs):
    records = []
    stats = ingest_stream(io.BytesIO(data), records.append, **kwargs)
    return records, stats


class TestMapKind:

    @pytest.mark.parametrize("name,kind", [
        ("article", RecordKind.JOURNAL_ARTICLE),
        ("inproceedings", RecordKind.CONFERENCE_ARTICLE),
        ("book", RecordKind.BOOK),
        ("incollection", RecordKind.BOOK_CHAPTER),
    ])
    def test_mapped(self, name, kind):
        assert map_kind(name) == kind

    def test_unmapped(self):
        assert map_kind("phdthesis") is None
        assert map_kind("www", {"key": "homepages/x"}) is None

    def test_empty_name(self):
        with pytest.raises(InvalidParameterError):
            map_kind("")


class TestIngestStream:

    def test_sample_document(self):
        records, stats = _ingest(SAMPLE)
        assert [r.record_id for r in records] == ["journals/tods/A1", "conf/vldb/B2", "books/C3"]
        assert stats.records_accepted == 3
        assert stats.records_skipped == 4
        assert stats.skip_reasons == Counter({
            SKIP_UNMAPPED: 1, SKIP_EMPTY_TITLE: 1, SKIP_INVALID_YEAR: 1, SKIP_MISSING_KEY: 1,
        })
        assert stats.total == 7

    def test_field_mapping(self):
        article, proceedings, book = _ingest(SAMPLE)[0]
        assert article.title == "Database Text Mining"
        assert article.authors == ("Alice", "Bob")
        assert article.url == "https://doi.org/x"
        assert article.venue.venue_type == VenueType.JOURNAL
        assert (article.venue.volume, article.venue.issue) == ("26", "2")
        assert proceedings.venue.venue_type == VenueType.PROCEEDINGS
        assert proceedings.url == "db/conf/vldb/vldb99.html"
        assert book.editors == ("Ed",) and book.isbn == "978-3" and book.authors == ()

    def test_empty_document(self):
        records, stats = _ingest(b"<dblp></dblp>")
        assert records == [] and stats.total == 0

    def test_only_unmapped_kinds(self):
        records, stats = _ingest(b"<dblp><www key='a'><title>x</title></www></dblp>")
        assert records == [] and stats.skip_reasons[SKIP_UNMAPPED] == 1

    def test_malformed_xml_aborts(self):
        broken = SAMPLE.replace(b"</inproceedings>", b"</inprocedings>")
        with pytest.raises(MalformedXml) as info:
            _ingest(broken)
        assert info.value.byte_offset > 0

    def test_oversized_element(self):
        big = b"<dblp><article key='a'><title>" + b"x" * 5000 + b"</title><year>1</year></article></dblp>"
        with pytest.raises(OversizedElement):
            _ingest(big, max_element_bytes=1024)

    def test_rejects_nonpositive_cap(self):
        with pytest.raises(InvalidParameterError):
            _ingest(SAMPLE, max_element_bytes=0)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataFileNotFoundError):
            ingest_stream(tmp_path / "dblp.xml", lambda r: None)

    def test_entities_from_inline_dtd(self):
        doc = (b'<?xml version="1.0"?><!DOCTYPE dblp [<!ENTITY uuml "&#252;">]>'
               b'<dblp><article key="k"><author>M&uuml;ller</author><title>T</title>'
               b'<year>2000</year></article></dblp>')
        records, _ = _ingest(doc)
        assert records[0].authors == ("Müller",)


class TestXmlRoundTrip:

    def test_emit_then_ingest_is_identity(self, fixture_records, tmp_path):
        path = emit_xml(fixture_records, tmp_path / "d.xml")[0]
        records = []
        stats = ingest_stream(path, records.append)
        assert stats.records_skipped == 0
        assert Counter(records) == Counter(fixture_records)

    def test_surrounding_whitespace_kept(self, tmp_path):
        rec = CanonicalRecord(record_id="k/1", title=" padded title ", year=2000,
                              authors=[" Ann ", "Bo\n"], kind=RecordKind.JOURNAL_ARTICLE,
                              venue=VenueRef(venue_title=" J "))
        path = emit_xml([rec], tmp_path / "p.xml")[0]
        records = []
        ingest_stream(path, records.append)
        assert records == [rec]

    def test_blank_title_skipped(self):
        doc = b"<dblp><article key='k'><title>   </title><year> 2001 </year></article></dblp>"
        records, stats = _ingest(doc)
        assert records == [] and stats.skip_reasons[SKIP_EMPTY_TITLE] == 1

    def test_randomized_datasets(self, random_records, tmp_path):
        for seed in range(5):
            original = random_records(200, seed)
            path = emit_xml(original, tmp_path / f"r{seed}.xml")[0]
            records = []
            ingest_stream(path, records.append)
            assert Counter(records) == Counter(original)


@pytest.mark.skipif(os.environ.get("DODBENCH_SLOW") != "1", reason="DODBENCH_SLOW=1 para activarlo")
def test_streaming_memory_bound(tmp_path, random_records):
    """~200 MB de XML con memoria del parser acotada."""
    import tracemalloc

    block = random_records(2000, 7)
    path = tmp_path / "big.xml"
    emit_xml(block * 1, path)
    unit = path.read_bytes()
    head, _, rest = unit.partition(b"<dblp>\n")
    body = rest.rsplit(b"</dblp>", 1)[0]
    repeats = max(1, (200 << 20) // len(body))
    with path.open('wb') as fh:
        fh.write(head + b"<dblp>\n")
        for _ in range(repeats):
            fh.write(body)
        fh.write(b"</dblp>\n")

    count = 0

    def sink(_record):
        nonlocal count
        count += 1

    tracemalloc.start()
    stats = ingest_stream(path, sink)
    _, peak = tracemalloc.get_traced_memory()
    tracemalloc.stop()
    assert count == stats.records_accepted == 2000 * repeats
    assert peak < 64 << 20
