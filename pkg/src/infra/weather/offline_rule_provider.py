# Faep is a realized-volatility forecasting workbench for half-hourly
# electricity spot prices, from jump decomposition to ensemble backtests.
# Copyright (C) 2025  Pierre Giusti
# 
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
# 
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
# 
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <https://www.gnu.org/licenses/>.

import hashlib
import json
import re
from typing import List, Tuple

from src.domain.weather.rating_provider_port import RatingProviderPort
from src.domain.weather.weather_data_objects import RatingRequest, RuleTable

_SENTENCE_END = re.compile(r"(?<=[.!?])\s+")


class OfflineRuleProvider(RatingProviderPort):
    """
    Deterministic stand-in for a language model. It keeps the retrieved
    sentences that mention the period (all of them when none does), finds
    the rule-table keywords they contain and replies
    "Rating: <base + weights> - <keywords>". The score is never clamped.
    """

    def __init__(self, rule_table: RuleTable):
        self.rule_table = rule_table

    @property
    def provider_id(self) -> str:
        rules = json.dumps({"base": self.rule_table.base, "weights": self.rule_table.weights}, sort_keys=True)
        return f"offline-rules-{hashlib.sha256(rules.encode('utf-8')).hexdigest()[:12]}"

    def complete(self, request: RatingRequest) -> str:
        keywords = self.matched_keywords(request)
        score = self.rule_table.base + sum(self.rule_table.weights[keyword] for keyword in keywords)
        return f"Rating: {score} - {', '.join(keywords) if keywords else 'no severity keyword'}"

    def matched_keywords(self, request: RatingRequest) -> Tuple[str, ...]:
        sentences: List[str] = [
            sentence.strip()
            for text in request.context_chunks
            for sentence in _SENTENCE_END.split(text)
            if sentence.strip()
        ]
        label = request.period_label.lower()
        relevant = [sentence for sentence in sentences if label in sentence.lower()] or sentences
        text = " ".join(relevant).lower()
        return tuple(
            keyword
            for keyword in sorted(self.rule_table.weights)
            if re.search(rf"\b{re.escape(keyword)}\b", text) is not None
        )
