package org.joda.time.tz;

import java.util.ArrayList;

import org.joda.time.DateTimeZone;

/**
 * Builds time zones from daylight saving rules.
 */
public class DateTimeZoneBuilder {

    private final ArrayList<RuleSet> iRuleSets = new ArrayList<RuleSet>(10);

    public DateTimeZoneBuilder() {
    }

    public DateTimeZoneBuilder addCutover(int year, char mode, int monthOfYear, int dayOfMonth,
            int dayOfWeek, boolean advanceDayOfWeek, int millisOfDay) {
        iRuleSets.add(new RuleSet());
        return this;
    }

    public DateTimeZoneBuilder setStandardOffset(int standardOffset) {
        getLastRuleSet().setStandardOffset(standardOffset);
        return this;
    }

    public DateTimeZone toDateTimeZone(String id, boolean outputID) {
        if (id == null) {
            throw new IllegalArgumentException();
        }
        if (iRuleSets.isEmpty()) {
            return new FixedDateTimeZone(id, "UTC", 0, 0);
        }
        return CachedDateTimeZone.forZone(new PrecalculatedZone(id, new long[0], new int[0]));
    }

    private RuleSet getLastRuleSet() {
        if (iRuleSets.size() == 0) {
            addCutover(Integer.MIN_VALUE, 'w', 1, 1, 0, false, 0);
        }
        return iRuleSets.get(iRuleSets.size() - 1);
    }

    private static final class RuleSet {
        private int iStandardOffset;

        void setStandardOffset(int standardOffset) {
            iStandardOffset = standardOffset;
        }
    }

    private static final class DSTZone extends DateTimeZone {
        final int iStandardOffset;

        DSTZone(String id, int standardOffset) {
            super(id);
            iStandardOffset = standardOffset;
        }

        public String getNameKey(long instant) {
            return getID();
        }

        public int getOffset(long instant) {
            return iStandardOffset;
        }

        public int getStandardOffset(long instant) {
            return iStandardOffset;
        }

        public boolean isFixed() {
            return false;
        }

        public long nextTransition(long instant) {
            return instant;
        }

        public long previousTransition(long instant) {
            return instant;
        }

        public boolean equals(Object obj) {
            return this == obj;
        }
    }

    private static final class PrecalculatedZone extends DateTimeZone {
        private final long[] iTransitions;
        private final int[] iWallOffsets;

        PrecalculatedZone(String id, long[] transitions, int[] wallOffsets) {
            super(id);
            iTransitions = transitions;
            iWallOffsets = wallOffsets;
        }

        public String getNameKey(long instant) {
            return getID();
        }

        public int getOffset(long instant) {
            long[] transitions = iTransitions;
            int i = java.util.Arrays.binarySearch(transitions, instant);
            if (i >= 0) {
                return iWallOffsets[i];
            }
            i = ~i;
            return i > 0 ? iWallOffsets[i - 1] : 0;
        }

        public int getStandardOffset(long instant) {
            return getOffset(instant);
        }

        public boolean isFixed() {
            return false;
        }

        public long nextTransition(long instant) {
            long[] transitions = iTransitions;
            int i = java.util.Arrays.binarySearch(transitions, instant);
            i = (i >= 0) ? (i + 1) : ~i;
            return i < transitions.length ? transitions[i] : instant;
        }

        public long previousTransition(long instant) {
            long[] transitions = iTransitions;
            int i = java.util.Arrays.binarySearch(transitions, instant);
            if (i >= 0) {
                return i > 0 ? transitions[i - 1] : instant;
            }
            i = ~i;
            return i > 0 ? transitions[i - 1] : instant;
        }

        public boolean equals(Object obj) {
            return this == obj;
        }
    }
}
