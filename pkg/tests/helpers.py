from layoutmetrics.schema import BBox, Block, BlockCategory, Language, PageDocument


def page(*blocks, page_id="p1", language=Language.EN, doc_category="academic_paper"):
    return PageDocument(page_id, language, doc_category, tuple(blocks))


def text(s, bbox=None, category=BlockCategory.TEXT):
    return Block(category, s, BBox(*bbox) if bbox else None)
