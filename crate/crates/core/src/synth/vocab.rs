//! Embedded vocabulary head: common English forms in rough frequency
//! order. Ranks beyond the list fall through to generated pseudo-words.

pub const COMMON_WORDS: &[&str] = &[
    "the", "of", "and", "a", "to", "in", "he", "was", "that", "it", "his", "her", "you", "as",
    "had", "with", "for", "she", "not", "at", "but", "be", "my", "on", "have", "him", "is",
    "said", "me", "which", "by", "so", "this", "all", "from", "they", "no", "were", "if",
    "would", "or", "when", "what", "there", "been", "one", "could", "very", "an", "who", "them",
    "mr", "we", "now", "more", "out", "do", "are", "up", "their", "your", "will", "little",
    "than", "then", "some", "into", "any", "well", "much", "about", "time", "know", "should",
    "man", "did", "like", "upon", "such", "never", "only", "good", "how", "before", "other",
    "see", "must", "am", "own", "come", "down", "say", "after", "think", "made", "might",
    "being", "mrs", "again", "great", "two", "can", "go", "over", "too", "here", "came", "old",
    "thought", "himself", "where", "our", "may", "first", "way", "has", "though", "without",
    "went", "us", "away", "day", "make", "these", "young", "nothing", "long", "shall", "sir",
    "back", "don't", "house", "ever", "yet", "take", "every", "hand", "most", "last", "eyes",
    "its", "miss", "having", "once", "head", "through", "same", "face", "against", "quite",
    "always", "still", "place", "heard", "life", "herself", "moment", "while", "told", "both",
    "even", "night", "saw", "looked", "people", "asked", "under", "room", "off", "things",
    "mind", "found", "father", "let", "anything", "because", "give", "many", "turned", "home",
    "why", "look", "mother", "knew", "got", "men", "soon", "something", "left", "felt", "seemed",
    "it's", "world", "done", "whole", "get", "until", "love", "indeed", "put", "another", "want",
    "door", "seen", "work", "three", "voice", "right", "however", "called", "wife", "course",
    "new", "just", "also", "side", "woman", "took", "going", "dear", "year", "part", "poor",
    "those", "between", "word", "whom", "enough", "almost", "round", "perhaps", "began",
    "morning", "better", "name", "few", "nor", "hands", "nature", "anyone", "end", "rather",
    "among", "stood", "leave", "half", "days", "that's", "heart", "money", "thing", "girl",
    "light", "together", "water", "case", "near", "present", "oh", "tell", "does", "gone",
    "hear", "far", "point", "since", "truth", "full", "small", "open", "each", "passed", "high",
    "alone", "doubt", "kind", "next", "brought", "best", "manner", "land", "white", "fact",
    "cried", "air", "within", "set", "wish", "matter", "behind", "certain", "during", "sure",
    "evening", "least", "others", "taken", "speak", "keep", "short", "power", "friend",
    "towards", "feel", "didn't", "country", "means", "believe", "child", "question", "hour",
    "answer", "times", "lay", "words", "care", "less", "given", "large", "need", "sense", "city",
    "returned", "children", "black", "use", "along", "feet", "table", "known", "already",
    "become", "making", "cannot", "four", "above", "sat", "order", "walked", "received", "i'm",
    "state", "themselves", "close", "body", "true", "none", "fire", "couldn't", "red", "five",
    "possible", "subject", "road", "account", "spirit", "family", "strong", "strange", "held",
    "century", "fine", "able", "struck", "bed", "law", "dark", "interest", "lost", "opened",
    "story", "coming", "reason", "deep", "hope", "human", "sort", "company", "master", "itself",
    "town", "several", "history", "sight", "everything", "greater", "common", "king", "number",
    "piece", "thinking", "second", "business", "doing", "certainly", "son", "live", "ground",
    "thousand", "book", "different", "field", "help", "either", "across", "continued", "stand",
    "later", "wanted", "window", "front", "sea", "party", "sound", "letter", "view", "appeared",
    "thus", "can't", "wasn't", "died", "war", "general", "suddenly", "past", "play", "run",
    "horse", "spoke", "purpose", "trees", "hard", "stay", "arms", "early", "ready", "wonder",
    "god", "afternoon", "followed", "led", "idea", "free", "try", "meant", "change",
    "understand", "court", "boy", "secret", "silence", "length", "mean", "blood", "showed",
    "object", "added", "remember", "person", "gave", "expected", "win", "today", "force", "art",
    "month", "green", "arm", "real", "ask", "presence", "entirely", "nearly", "caught", "single",
    "circumstances", "grew", "especially", "character", "pleasure", "suppose", "lived", "effect",
    "respect", "sister", "usual", "direction", "born", "attention", "break", "brother",
    "immediately", "talk", "running", "necessary", "future", "forth", "happy", "office",
    "carried", "condition", "besides", "sun", "fair", "service", "wind", "church", "position",
    "beautiful", "age", "beyond", "instead", "figure", "desire", "ago", "step", "various",
    "silent", "persons", "further", "society", "opinion", "rose", "remained", "tried", "feeling",
    "except", "seems", "call", "chance", "formed", "bright", "walk", "village", "paper",
    "waiting", "knowledge", "late", "public", "entered", "turn", "simple", "simply", "happened",
    "appearance", "particular", "glad", "whatever", "places", "private", "action", "paid", "top",
    "occasion", "afraid", "stone", "news", "france", "england", "london", "north", "south",
    "river", "school", "self", "clear", "trouble", "complete", "pretty", "marriage", "lips",
    "low", "rich", "army", "honour", "week", "system", "cold", "floor", "everyone", "understood",
    "plain", "earth", "wild", "scene", "considered", "fear", "spot", "laid", "smile", "quiet",
    "conversation", "pass", "easily", "probably", "seeing", "distance", "minutes", "peace",
    "blue", "garden", "american", "expression", "exactly", "crowd", "wished", "wall", "ten",
    "corner", "fell",
];
