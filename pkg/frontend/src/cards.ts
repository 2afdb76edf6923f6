import type { RecommendationPayload } from "./types";

export interface CardAlternative {
  recommendationId: string;
  code: string;
  confidence: number;
  provenanceComment: string;
}

export interface RecommendationCard {
  lhsSignatures: string[];
  alternatives: CardAlternative[];
  activeIndex: number;
}

/**
 * Group recommendations sharing a left-hand side into one card each.
 *
 * The server already orders recommendations by descending confidence and
 * the grouping preserves that order, so a card's alternatives are ranked
 * without any client-side re-sorting.
 */
export function groupIntoCards(recs: RecommendationPayload[]): RecommendationCard[] {
  const byLhs = new Map<string, RecommendationCard>();
  for (const rec of recs) {
    const key = JSON.stringify(rec.lhs_signatures);
    let card = byLhs.get(key);
    if (!card) {
      card = { lhsSignatures: rec.lhs_signatures, alternatives: [], activeIndex: 0 };
      byLhs.set(key, card);
    }
    card.alternatives.push({
      recommendationId: rec.recommendation_id,
      code: rec.code,
      confidence: rec.confidence,
      provenanceComment: rec.provenance.comment,
    });
  }
  return [...byLhs.values()];
}

export function cycleAlternative(card: RecommendationCard, delta: 1 | -1): RecommendationCard {
  const n = card.alternatives.length;
  return { ...card, activeIndex: (card.activeIndex + delta + n) % n };
}

export function activeAlternative(card: RecommendationCard): CardAlternative {
  return card.alternatives[card.activeIndex];
}

/** Codes currently offered across all cards, for subset comparisons. */
export function offeredCodes(cards: RecommendationCard[]): Set<string> {
  const out = new Set<string>();
  for (const card of cards) {
    for (const alt of card.alternatives) out.add(alt.code);
  }
  return out;
}
