from .extract import FeatureVector, GroupStats, extract_all
from .schema import FEATURE_NAMES, FEATURE_CATEGORY, METADATA_COLUMNS, csv_header
