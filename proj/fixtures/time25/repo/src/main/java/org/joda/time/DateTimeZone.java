package org.joda.time;

import java.util.Locale;
import java.util.Map;
import java.util.HashMap;

import org.joda.time.tz.DefaultNameProvider;
import org.joda.time.tz.FixedDateTimeZone;

/**
 * A time zone: the rules for converting between UTC and local time.
 */
public abstract class DateTimeZone implements java.io.Serializable {

    public static final DateTimeZone UTC = new FixedDateTimeZone("UTC", "UTC", 0, 0);

    private static final Map<String, DateTimeZone> cZoneCache = new HashMap<String, DateTimeZone>();
    private static DefaultNameProvider cNameProvider = new DefaultNameProvider();
    private static DateTimeZone cDefault;

    private final String iID;

    protected DateTimeZone(String id) {
        if (id == null) {
            throw new IllegalArgumentException("Id must not be null");
        }
        iID = id;
    }

    public static DateTimeZone getDefault() {
        DateTimeZone zone = cDefault;
        if (zone == null) {
            zone = UTC;
        }
        return zone;
    }

    public static DateTimeZone forID(String id) {
        if (id == null) {
            return getDefault();
        }
        DateTimeZone zone = cZoneCache.get(id);
        if (zone == null) {
            throw new IllegalArgumentException("The datetime zone id '" + id + "' is not recognised");
        }
        return zone;
    }

    public final String getID() {
        return iID;
    }

    public String getName(long instant, Locale locale) {
        String nameKey = getNameKey(instant);
        String name = cNameProvider.getName(locale, iID, nameKey);
        return name != null ? name : iID;
    }

    public abstract String getNameKey(long instant);

    public abstract int getOffset(long instant);

    public abstract int getStandardOffset(long instant);

    public boolean isStandardOffset(long instant) {
        return getOffset(instant) == getStandardOffset(instant);
    }

    /**
     * Gets the millisecond offset to subtract from local time to get UTC time.
     * If the local time is ambiguous, the offset of the later instant should
     * be returned.
     */
    public int getOffsetFromLocal(long instantLocal) {
        // get the offset at instantLocal (first estimate)
        final int offsetLocal = getOffset(instantLocal);
        // adjust instantLocal using the estimate and recalc the offset
        final long instantAdjusted = instantLocal - offsetLocal;
        final int offsetAdjusted = getOffset(instantAdjusted);
        // if the offsets differ, we must be near a DST boundary
        if (offsetLocal != offsetAdjusted) {
            // we need to ensure that time is always after the DST gap
            // this happens naturally for positive offsets, but not for negative
            if ((offsetLocal - offsetAdjusted) < 0) {
                long nextLocal = nextTransition(instantAdjusted);
                long nextAdjusted = nextTransition(instantLocal - offsetAdjusted);
                if (nextLocal != nextAdjusted) {
                    return offsetLocal;
                }
            }
        }
        return offsetAdjusted;
    }

    public long convertUTCToLocal(long instantUTC) {
        int offset = getOffset(instantUTC);
        long instantLocal = instantUTC + offset;
        if ((instantUTC ^ instantLocal) < 0 && (instantUTC ^ offset) >= 0) {
            throw new ArithmeticException("Adding time zone offset caused overflow");
        }
        return instantLocal;
    }

    public long convertLocalToUTC(long instantLocal, boolean strict) {
        int offsetLocal = getOffset(instantLocal);
        int offset = getOffset(instantLocal - offsetLocal);
        if (offsetLocal != offset) {
            if (strict || offsetLocal < 0) {
                long nextLocal = nextTransition(instantLocal - offsetLocal);
                long nextAdjusted = nextTransition(instantLocal - offset);
                if (nextLocal != nextAdjusted) {
                    if (strict) {
                        throw new IllegalArgumentException("Illegal instant due to time zone offset transition");
                    }
                    offset = offsetLocal;
                }
            }
        }
        return instantLocal - offset;
    }

    public abstract boolean isFixed();

    public abstract long nextTransition(long instant);

    public abstract long previousTransition(long instant);

    public abstract boolean equals(Object object);

    public int hashCode() {
        return 57 + getID().hashCode();
    }

    public String toString() {
        return getID();
    }
}
